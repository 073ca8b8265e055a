use num_complex::Complex64;

use super::field::ConformalMetricField;
use super::grid::ChartGrid;
use super::maps::HolomorphicMap;
use super::stencil::DiffOps;
use crate::error::{Error, Result};

/// A quadratic differential `q dz²` sampled on a chart grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDifferential {
    grid: ChartGrid,
    q: Vec<Complex64>,
}

impl QuadDifferential {
    pub fn new(grid: &ChartGrid, q: Vec<Complex64>) -> Result<Self> {
        if q.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: grid.clone(),
            q,
        })
    }

    pub fn zeros(grid: &ChartGrid) -> Self {
        Self {
            grid: grid.clone(),
            q: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: &ChartGrid, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            q: (0..grid.len()).map(|p| f(grid.point_at(p))).collect(),
        }
    }

    pub fn grid(&self) -> &ChartGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.q
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            q: self.q.iter().map(|v| v * s).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// `sup |q| e^{−2η}` over the grid, the pointwise norm relative to `h`.
    pub fn hyperbolic_sup_norm(&self, h: &ConformalMetricField) -> Result<f64> {
        if &self.grid != h.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .q
            .iter()
            .enumerate()
            .map(|(p, v)| v.norm() / h.density(p))
            .fold(0.0, f64::max))
    }

    /// Sup-norm of the finite-difference `∂_z̄ q`, zero for a holomorphic
    /// coefficient up to discretization error.
    pub fn holomorphy_defect(&self) -> f64 {
        DiffOps::new(&self.grid)
            .dzbar_complex(&self.q)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Sup-norm of the finite-difference `∂_z q`, a scale for
    /// [`holomorphy_defect`](Self::holomorphy_defect).
    pub fn derivative_scale(&self) -> f64 {
        DiffOps::new(&self.grid)
            .dz_complex(&self.q)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Schwarzian `S(f) = f‴/f′ − (3/2)(f″/f′)²` of a locally injective
/// holomorphic map at every grid node.
pub fn schwarzian_map<M: HolomorphicMap + ?Sized>(
    f: &M,
    grid: &ChartGrid,
) -> Result<QuadDifferential> {
    let mut q = Vec::with_capacity(grid.len());
    for p in 0..grid.len() {
        let z = grid.point_at(p);
        let [_, f1, f2, f3] = f.jet3(z);
        if !f1.is_finite() || f1.norm() <= 1e-300 {
            return Err(Error::VanishingDerivative { z });
        }
        let r = f2 / f1;
        q.push(f3 / f1 - 1.5 * r * r);
    }
    QuadDifferential::new(grid, q)
}
