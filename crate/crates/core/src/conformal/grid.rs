use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum node count per axis.
pub const MIN_NODES: usize = 8;

/// A uniform grid on a complex chart.
///
/// Node `(i, j)` sits at real offset `i·hx` and imaginary offset `j·hy` from
/// `origin`. The x-axis may be periodic, in which case the nodes `0..nx`
/// cover exactly one period and node `nx` wraps to node `0`. Field data is stored row-major with index `j·nx + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartGrid {
    origin: Complex64,
    hx: f64,
    hy: f64,
    nx: usize,
    ny: usize,
    period_x: Option<f64>,
}

impl ChartGrid {
    /// Square-cell grid without periodicity.
    pub fn new(origin: Complex64, spacing: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::with_spacings(origin, spacing, spacing, nx, ny)
    }

    pub fn with_spacings(
        origin: Complex64,
        hx: f64,
        hy: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let grid = Self {
            origin,
            hx,
            hy,
            nx,
            ny,
            period_x: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid whose x-axis wraps with the given period; `hx = period / nx`.
    pub fn periodic_x(
        origin: Complex64,
        period: f64,
        nx: usize,
        hy: f64,
        ny: usize,
    ) -> Result<Self> {
        if nx == 0 || !(period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "periodic axis needs nx > 0 and period > 0, got nx = {nx}, period = {period}"
            )));
        }
        let grid = Self {
            origin,
            hx: period / nx as f64,
            hy,
            nx,
            ny,
            period_x: Some(period),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid covering `[x0, x1] × [y0, y1]` with `n` nodes per side.
    pub fn square(x0: f64, x1: f64, y0: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two nodes, got {n}"
            )));
        }
        Self::new(Complex64::new(x0, y0), (x1 - x0) / (n - 1) as f64, n, n)
    }

    fn validate(&self) -> Result<()> {
        if !(self.hx > 0.0 && self.hy > 0.0) || !self.hx.is_finite() || !self.hy.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got hx = {}, hy = {}",
                self.hx, self.hy
            )));
        }
        if self.nx < MIN_NODES || self.ny < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes per axis, got {}×{}",
                self.nx, self.ny
            )));
        }
        if let Some(p) = self.period_x {
            if (self.nx as f64 * self.hx - p).abs() > 1e-12 * p.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "periodic node count {} with spacing {} does not match period {p}",
                    self.nx, self.hx
                )));
            }
        }
        Ok(())
    }

    pub fn origin(&self) -> Complex64 {
        self.origin
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn period_x(&self) -> Option<f64> {
        self.period_x
    }
    pub fn is_periodic_x(&self) -> bool {
        self.period_x.is_some()
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new(i as f64 * self.hx, j as f64 * self.hy)
    }

    pub fn point_at(&self, index: usize) -> Complex64 {
        let (i, j) = self.coords(index);
        self.point(i, j)
    }

    /// True on the edges of non-periodic axes.
    pub fn is_boundary(&self, index: usize) -> bool {
        let (i, j) = self.coords(index);
        let x_edge = !self.is_periodic_x() && (i == 0 || i + 1 == self.nx);
        x_edge || j == 0 || j + 1 == self.ny
    }

    /// Indices of nodes off the non-periodic boundary, in storage order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| !self.is_boundary(p)).collect()
    }

    /// Quadrature weight of a node: trapezoid on bounded axes, uniform on the
    /// periodic axis.
    pub fn weight(&self, index: usize) -> f64 {
        let (i, j) = self.coords(index);
        let wx = if self.is_periodic_x() || (i > 0 && i + 1 < self.nx) {
            self.hx
        } else {
            0.5 * self.hx
        };
        let wy = if j > 0 && j + 1 < self.ny {
            self.hy
        } else {
            0.5 * self.hy
        };
        wx * wy
    }

    /// Same node layout with a different scale; used for grid-refinement studies.
    pub fn refined(&self) -> Result<Self> {
        match self.period_x {
            Some(p) => {
                Self::periodic_x(self.origin, p, 2 * self.nx, 0.5 * self.hy, 2 * self.ny - 1)
            }
            None => Self::with_spacings(
                self.origin,
                0.5 * self.hx,
                0.5 * self.hy,
                2 * self.nx - 1,
                2 * self.ny - 1,
            ),
        }
    }
}
