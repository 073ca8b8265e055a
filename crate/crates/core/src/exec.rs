//! Execution policy for grid kernels.
//!
//! Every pointwise kernel in the crate goes through [`map_range`], which runs
//! on rayon when the `parallel` feature is enabled and the policy asks for it,
//! and falls back to a plain loop otherwise. Output order is always the index
//! order, so both paths produce bit-identical results.

/// How a grid kernel is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this policy will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Evaluates `f(0), …, f(n-1)` and collects the results in index order.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Sum of `f(i)` over rows, reduced in a fixed order.
///
/// Rows are evaluated (possibly in parallel) and the partial sums are added
/// sequentially, so the result does not depend on the thread count.
pub fn sum_rows<F>(exec: Exec, rows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_range(exec, rows, f).into_iter().sum()
}
