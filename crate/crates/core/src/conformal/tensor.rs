use num_complex::Complex64;

use super::field::ConformalMetricField;
use super::grid::ChartGrid;
use super::quad::QuadDifferential;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Value `f|dz|² + Re(q dz²)` of a symmetric 2-tensor at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorValue {
    pub f: f64,
    pub q: Complex64,
}

impl TensorValue {
    pub fn det(&self) -> f64 {
        self.f * self.f - self.q.norm_sqr()
    }
}

/// A symmetric 2-tensor `f|dz|² + Re(q dz²)`.
///
/// In real coordinates this is the matrix
/// `[[f + Re q, −Im q], [−Im q, f − Re q]]`, so it is positive definite
/// exactly where `f > |q|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTwoTensor {
    grid: ChartGrid,
    f: Vec<f64>,
    q: Vec<Complex64>,
}

impl SymTwoTensor {
    pub fn new(grid: &ChartGrid, f: Vec<f64>, q: Vec<Complex64>) -> Result<Self> {
        if f.len() != grid.len() || q.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: grid.clone(),
            f,
            q,
        })
    }

    pub fn zeros(grid: &ChartGrid) -> Self {
        Self {
            grid: grid.clone(),
            f: vec![0.0; grid.len()],
            q: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// The metric tensor `e^{2η}|dz|²` itself.
    pub fn from_metric(sigma: &ConformalMetricField) -> Self {
        let n = sigma.grid().len();
        Self {
            grid: sigma.grid().clone(),
            f: (0..n).map(|p| sigma.density(p)).collect(),
            q: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// `Re(φ)` for a quadratic differential `φ`.
    pub fn real_part(phi: &QuadDifferential) -> Self {
        Self {
            grid: phi.grid().clone(),
            f: vec![0.0; phi.grid().len()],
            q: phi.values().to_vec(),
        }
    }

    /// `Im(φ) = Re(−iφ)`.
    pub fn imag_part(phi: &QuadDifferential) -> Self {
        Self::real_part(&phi.scale(Complex64::new(0.0, -1.0)))
    }

    pub fn grid(&self) -> &ChartGrid {
        &self.grid
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    pub fn at(&self, p: usize) -> TensorValue {
        TensorValue {
            f: self.f[p],
            q: self.q[p],
        }
    }

    /// Real 2×2 matrix at a node.
    pub fn matrix(&self, p: usize) -> [[f64; 2]; 2] {
        let (f, q) = (self.f[p], self.q[p]);
        [[f + q.re, -q.im], [-q.im, f - q.re]]
    }

    pub fn det(&self, p: usize) -> f64 {
        self.f[p] * self.f[p] - self.q[p].norm_sqr()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.f.iter().zip(&self.q).all(|(f, q)| *f > q.norm())
    }

    pub fn is_negative_definite(&self) -> bool {
        self.f.iter().zip(&self.q).all(|(f, q)| -*f > q.norm())
    }

    /// Node indices where the tensor fails to be positive definite.
    pub fn non_positive_nodes(&self) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&p| self.f[p] <= self.q[p].norm())
            .collect()
    }

    fn zip_with(
        &self,
        other: &Self,
        ff: impl Fn(f64, f64) -> f64,
        fq: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            f: self
                .f
                .iter()
                .zip(&other.f)
                .map(|(a, b)| ff(*a, *b))
                .collect(),
            q: self
                .q
                .iter()
                .zip(&other.q)
                .map(|(a, b)| fq(*a, *b))
                .collect(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            f: self.f.iter().map(|v| v * s).collect(),
            q: self.q.iter().map(|v| v * s).collect(),
        }
    }

    /// Pure-trace part `f|dz|²`.
    pub fn trace_part(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            f: self.f.clone(),
            q: vec![Complex64::new(0.0, 0.0); self.grid.len()],
        }
    }

    /// Trace-free part `Re(q dz²)`.
    pub fn trace_free_part(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            f: vec![0.0; self.grid.len()],
            q: self.q.clone(),
        }
    }

    /// Pointwise `h`-norm `|T|_h = √tr(h⁻¹T h⁻¹T)` at a node.
    pub fn pointwise_norm(&self, p: usize, h: &ConformalMetricField) -> f64 {
        (2.0 * (self.f[p] * self.f[p] + self.q[p].norm_sqr())).sqrt() / h.density(p)
    }

    /// `sup_z |T|_h`.
    pub fn sup_norm(&self, h: &ConformalMetricField) -> Result<f64> {
        if &self.grid != h.grid() {
            return Err(Error::GridMismatch);
        }
        Ok((0..self.grid.len())
            .map(|p| self.pointwise_norm(p, h))
            .fold(0.0, f64::max))
    }
}

/// `∫ ⟨a, b⟩_h dA_h` by trapezoid/periodic quadrature.
///
/// Pointwise `⟨a, b⟩_h dA_h = 2 e^{−2η}(f_a f_b + Re(q_a q̄_b)) dx dy`.
pub fn pairing(a: &SymTwoTensor, b: &SymTwoTensor, h: &ConformalMetricField) -> Result<f64> {
    if a.grid != b.grid || &a.grid != h.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = &a.grid;
    let ny = grid.ny();
    let nx = grid.nx();
    Ok(crate::exec::sum_rows(
        crate::exec::Exec::default(),
        ny,
        |j| {
            (0..nx)
                .map(|i| {
                    let p = grid.index(i, j);
                    let inner = a.f[p] * b.f[p] + (a.q[p] * b.q[p].conj()).re;
                    2.0 * inner / h.density(p) * grid.weight(p)
                })
                .sum()
        },
    ))
}

/// L²(h) norm `√⟨a, a⟩`.
pub fn l2_norm(a: &SymTwoTensor, h: &ConformalMetricField) -> Result<f64> {
    Ok(pairing(a, a, h)?.max(0.0).sqrt())
}

/// Pointwise matrix invariants of a pair of tensors relative to a metric.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorAlgebra {
    /// `det a = f² − |q|²` in chart coordinates.
    pub det_a: Vec<f64>,
    /// `tr(h⁻¹a) = 2 f_a e^{−2η}`.
    pub trace_h_a: Vec<f64>,
    /// `tr(a⁻¹b)`.
    pub shape_trace: Vec<f64>,
    /// `det(a⁻¹b)`.
    pub shape_det: Vec<f64>,
    /// `∫⟨a, b⟩_h dA_h`.
    pub pairing: f64,
}

pub fn tensor_algebra(
    a: &SymTwoTensor,
    b: &SymTwoTensor,
    h: &ConformalMetricField,
) -> Result<TensorAlgebra> {
    let pair = pairing(a, b, h)?;
    let n = a.grid.len();
    let mut out = TensorAlgebra {
        det_a: Vec::with_capacity(n),
        trace_h_a: Vec::with_capacity(n),
        shape_trace: Vec::with_capacity(n),
        shape_det: Vec::with_capacity(n),
        pairing: pair,
    };
    for p in 0..n {
        let det_a = a.det(p);
        let scale = a.f[p] * a.f[p] + a.q[p].norm_sqr();
        if !(det_a.abs() > 1e-14 * scale) || scale == 0.0 {
            return Err(Error::SingularTensor {
                index: p,
                z: a.grid.point_at(p),
            });
        }
        out.det_a.push(det_a);
        out.trace_h_a.push(2.0 * a.f[p] / h.density(p));
        out.shape_trace
            .push(2.0 * (a.f[p] * b.f[p] - (a.q[p] * b.q[p].conj()).re) / det_a);
        out.shape_det.push(b.det(p) / det_a);
    }
    Ok(out)
}
