use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{c_of_k, residual_points, Mode, ModelSurface, PointResidual, SolverConfig};
use crate::conformal::ConformalMetricField;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Outcome of one Newton solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    /// Conformal factor with `τ = e^{2u} h`.
    pub u: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm of the residual over unknown nodes at exit.
    pub residual: f64,
    /// Residual sup-norm before each iteration, ending with the accepted one.
    pub residual_history: Vec<f64>,
}

/// Unknown numbering: nodes off the Dirichlet boundary.
struct Unknowns {
    nodes: Vec<usize>,
    column: Vec<Option<usize>>,
}

impl Unknowns {
    fn new(surface: &ModelSurface) -> Self {
        let grid = surface.grid();
        let nodes = grid.interior();
        let mut column = vec![None; grid.len()];
        for (c, &p) in nodes.iter().enumerate() {
            column[p] = Some(c);
        }
        Self { nodes, column }
    }
}

fn jacobian_rows(
    tau: &ConformalMetricField,
    points: &[PointResidual],
    surface: &ModelSurface,
    unknowns: &Unknowns,
) -> Vec<Vec<(usize, f64)>> {
    let ops = surface.ops();
    unknowns
        .nodes
        .iter()
        .map(|&p| {
            let r = &points[p];
            let eta = tau.eta()[p];
            let e2 = (-2.0 * eta).exp();
            let e4 = e2 * e2;
            let eta_z = tau.eta_z()[p];
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            for (q, w) in ops.taps(p) {
                let Some(col) = unknowns.column[q] else {
                    continue;
                };
                let vz = Complex64::new(0.5 * w[0], -0.5 * w[1]);
                let vzz = Complex64::new(0.25 * (w[2] - w[3]), -0.5 * w[4]);
                let vzzbar = 0.25 * (w[2] + w[3]);
                let dk = -4.0 * e2 * vzzbar;
                let db = vzz - 2.0 * eta_z * vz;
                let dbn = 2.0 * e4 * (r.b.conj() * db).re;
                *row.entry(col).or_default() += r.d_curv * dk + r.d_bnorm * dbn;
            }
            // Zeroth-order terms from δη = v: δK ∋ −2vK and δ(|B|²/τ²) ∋ −4v·|B|²/τ².
            let diag = unknowns.column[p].expect("row node is an unknown");
            *row.entry(diag).or_default() +=
                r.d_curv * (-2.0 * r.curvature) + r.d_bnorm * (-4.0 * r.bnorm);
            row.into_iter().collect()
        })
        .collect()
}

fn solve_linear(rows: &[Vec<(usize, f64)>], rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    let triplets: Vec<Triplet<usize, usize, f64>> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |&(c, v)| Triplet::new(r, c, v)))
        .collect();
    let jac = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Ellipticity(format!("Jacobian assembly failed: {e:?}")))?;
    let lu = jac
        .sp_lu()
        .map_err(|e| Error::Ellipticity(format!("sparse LU factorization failed: {e:?}")))?;
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Ellipticity(
            "linear solve produced non-finite values".into(),
        ));
    }
    let scale = rhs
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let defect = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| (row.iter().map(|&(c, v)| v * x[c]).sum::<f64>() - b).abs())
        .fold(0.0, f64::max);
    if defect > tol * scale {
        return Err(Error::Ellipticity(format!(
            "linear residual {defect:e} exceeds {tol:e} relative to right-hand side {scale:e}"
        )));
    }
    Ok(x)
}

/// Solves the selected scaled equation for `u` with `u = 0` on the
/// non-periodic boundary, starting from `init`.
///
/// The Newton matrix is the exact derivative of the discrete residual.
pub fn newton_solve(
    mode: Mode,
    k: f64,
    surface: &ModelSurface,
    init: &[f64],
    config: &SolverConfig,
) -> Result<NewtonReport> {
    config.validate()?;
    let grid = surface.grid();
    if init.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let unknowns = Unknowns::new(surface);
    let mut u = vec![0.0; grid.len()];
    for &p in &unknowns.nodes {
        u[p] = init[p];
    }
    let mut history = Vec::new();
    for iter in 0..=config.max_iter {
        let tau = surface.h().perturbed_with(&u, surface.ops())?;
        let points = residual_points(mode, k, &tau, surface, Exec::Sequential)?;
        let rhs: Vec<f64> = unknowns.nodes.iter().map(|&p| -points[p].value).collect();
        let norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        history.push(norm);
        if norm <= config.newton_tol {
            return Ok(NewtonReport {
                u,
                iterations: iter,
                residual: norm,
                residual_history: history,
            });
        }
        if iter == config.max_iter || !norm.is_finite() {
            return Err(Error::NonConvergence {
                iterations: iter,
                residual: norm,
            });
        }
        let rows = jacobian_rows(&tau, &points, surface, &unknowns);
        let delta = solve_linear(&rows, &rhs, config.linear_solver_tol)?;
        for (c, &p) in unknowns.nodes.iter().enumerate() {
            u[p] += delta[c];
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// One solved member of a branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub k: f64,
    pub u: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

impl BranchSample {
    pub fn u_sup(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solutions `τ_k = e^{2u_k} h` along a path of `k` values increasing to `0⁻`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoliationBranch {
    pub mode: Mode,
    pub newton_tol: f64,
    pub samples: Vec<BranchSample>,
}

impl FoliationBranch {
    /// Residuals within tolerance, `k` strictly increasing and negative, and
    /// `‖u‖∞` non-increasing toward `k = 0`.
    pub fn check_invariants(&self) -> Result<()> {
        for s in &self.samples {
            if !(s.residual <= self.newton_tol) {
                return Err(Error::Unconverged {
                    k: s.k,
                    residual: s.residual,
                });
            }
            if !(s.k < 0.0 && s.k > -1.0) {
                return Err(Error::BranchInvariant(format!(
                    "k = {} is outside (-1, 0)",
                    s.k
                )));
            }
        }
        for w in self.samples.windows(2) {
            if !(w[0].k < w[1].k) {
                return Err(Error::BranchInvariant(format!(
                    "k values {} and {} are not strictly increasing",
                    w[0].k, w[1].k
                )));
            }
            if w[1].u_sup() > w[0].u_sup() {
                return Err(Error::BranchInvariant(format!(
                    "sup|u| grows from {:e} at k = {} to {:e} at k = {}",
                    w[0].u_sup(),
                    w[0].k,
                    w[1].u_sup(),
                    w[1].k
                )));
            }
        }
        Ok(())
    }

    /// Scaled metric `τ_k` of sample `i`.
    pub fn tau(&self, i: usize, surface: &ModelSurface) -> Result<ConformalMetricField> {
        surface
            .h()
            .perturbed_with(&self.samples[i].u, surface.ops())
    }

    /// Unscaled metric `σ_k = c(k) τ_k` of sample `i`.
    pub fn sigma(&self, i: usize, surface: &ModelSurface) -> Result<ConformalMetricField> {
        unscale(self.mode, self.samples[i].k, &self.tau(i, surface)?)
    }
}

/// Solves at every `k` in `k_list`, continuing outward from the hyperbolic
/// metric at `k = 0` and warm-starting each solve from the previous one.
/// Steps longer than `config.k_step` are subdivided; intermediate solves are
/// not stored.
pub fn continuation(
    mode: Mode,
    k_list: &[f64],
    surface: &ModelSurface,
    config: &SolverConfig,
) -> Result<FoliationBranch> {
    config.validate()?;
    if k_list.is_empty() {
        return Err(Error::InsufficientData("empty k list".into()));
    }
    for &k in k_list {
        c_of_k(k)?;
    }
    let mut order: Vec<f64> = k_list.to_vec();
    order.sort_by(|a, b| b.total_cmp(a));
    if order.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig("k list contains duplicates".into()));
    }
    let mut u = vec![0.0; surface.grid().len()];
    let mut k_prev = 0.0;
    let mut samples = Vec::with_capacity(order.len());
    for &k in &order {
        let n = ((k_prev - k) / config.k_step).ceil().max(1.0) as usize;
        let mut last = None;
        for m in 1..=n {
            let kk = if m == n {
                k
            } else {
                k_prev + (k - k_prev) * m as f64 / n as f64
            };
            let report =
                newton_solve(mode, kk, surface, &u, config).map_err(|e| Error::Continuation {
                    k: kk,
                    source: Box::new(e),
                })?;
            u.clone_from(&report.u);
            last = Some(report);
        }
        let report = last.expect("at least one solve per k");
        samples.push(BranchSample {
            k,
            u: report.u,
            residual: report.residual,
            iterations: report.iterations,
            residual_history: report.residual_history,
        });
        k_prev = k;
    }
    samples.reverse();
    Ok(FoliationBranch {
        mode,
        newton_tol: config.newton_tol,
        samples,
    })
}

/// `σ_k = c(k) τ`.
pub fn unscale(mode: Mode, k: f64, tau: &ConformalMetricField) -> Result<ConformalMetricField> {
    tau.scaled(super::unscale_factor(mode, k)?)
}
