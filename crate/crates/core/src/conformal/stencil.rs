//! Finite-difference operators on [`ChartGrid`]s.
//!
//! Interior nodes use centered 5-point stencils (4th order for first and
//! second derivatives). Nodes within two cells of a bounded edge use a
//! 6-point one-sided window. The periodic axis always uses the centered
//! stencil with wrap-around. Mixed derivatives are tensor products of the
//! first-derivative stencils.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::grid::ChartGrid;
use crate::exec::{map_range, Exec};

/// Fornberg's recursion: weights of the `order`-th derivative at `x0`
/// for nodes `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

type Taps = Vec<(usize, f64)>;

#[derive(Clone, Debug)]
struct AxisStencil {
    d1: Vec<Taps>,
    d2: Vec<Taps>,
}

impl AxisStencil {
    fn new(n: usize, h: f64, periodic: bool) -> Self {
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let centered: Vec<f64> = (-2..=2).map(|k| k as f64).collect();
        let w1c = fd_weights(0.0, &centered, 1);
        let w2c = fd_weights(0.0, &centered, 2);
        for i in 0..n {
            if periodic || (i >= 2 && i + 2 < n) {
                let idx = (-2isize..=2).map(|k| (i as isize + k).rem_euclid(n as isize) as usize);
                d1.push(
                    idx.clone()
                        .zip(w1c.iter())
                        .map(|(p, w)| (p, w / h))
                        .collect(),
                );
                d2.push(idx.zip(w2c.iter()).map(|(p, w)| (p, w / (h * h))).collect());
            } else {
                let start = if i < 2 { 0 } else { n - 6 };
                let nodes: Vec<f64> = (start..start + 6).map(|p| p as f64).collect();
                let w1 = fd_weights(i as f64, &nodes, 1);
                let w2 = fd_weights(i as f64, &nodes, 2);
                d1.push(
                    (start..start + 6)
                        .zip(w1)
                        .map(|(p, w)| (p, w / h))
                        .collect(),
                );
                d2.push(
                    (start..start + 6)
                        .zip(w2)
                        .map(|(p, w)| (p, w / (h * h)))
                        .collect(),
                );
            }
        }
        Self { d1, d2 }
    }
}

/// Real partial derivatives of a scalar field.
#[derive(Clone, Debug, Default)]
pub struct Partials {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub xx: Vec<f64>,
    pub yy: Vec<f64>,
    pub xy: Vec<f64>,
}

impl Partials {
    /// `∂_z = (∂_x − i∂_y)/2`.
    pub fn dz(&self, p: usize) -> Complex64 {
        Complex64::new(0.5 * self.x[p], -0.5 * self.y[p])
    }
    /// `∂_z∂_z = (∂_xx − ∂_yy − 2i∂_xy)/4`.
    pub fn dzz(&self, p: usize) -> Complex64 {
        Complex64::new(0.25 * (self.xx[p] - self.yy[p]), -0.5 * self.xy[p])
    }
    /// `∂_z∂_z̄ = (∂_xx + ∂_yy)/4`.
    pub fn dzzbar(&self, p: usize) -> f64 {
        0.25 * (self.xx[p] + self.yy[p])
    }
}

/// Weights of one neighbor in the five partial-derivative operators
/// `[x, y, xx, yy, xy]`.
pub type TapWeights = [f64; 5];

/// Finite-difference operators bound to one grid.
#[derive(Clone, Debug)]
pub struct DiffOps {
    nx: usize,
    ny: usize,
    x: AxisStencil,
    y: AxisStencil,
}

impl DiffOps {
    pub fn new(grid: &ChartGrid) -> Self {
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            x: AxisStencil::new(grid.nx(), grid.hx(), grid.is_periodic_x()),
            y: AxisStencil::new(grid.ny(), grid.hy(), false),
        }
    }

    fn apply_x(&self, taps: &[Taps], v: &[f64], exec: Exec) -> Vec<f64> {
        let nx = self.nx;
        map_range(exec, v.len(), |p| {
            let (i, j) = (p % nx, p / nx);
            taps[i].iter().map(|&(a, w)| w * v[j * nx + a]).sum()
        })
    }

    fn apply_y(&self, taps: &[Taps], v: &[f64], exec: Exec) -> Vec<f64> {
        let nx = self.nx;
        map_range(exec, v.len(), |p| {
            let (i, j) = (p % nx, p / nx);
            taps[j].iter().map(|&(b, w)| w * v[b * nx + i]).sum()
        })
    }

    pub fn partials(&self, v: &[f64]) -> Partials {
        self.partials_with(v, Exec::default())
    }

    pub fn partials_with(&self, v: &[f64], exec: Exec) -> Partials {
        assert_eq!(
            v.len(),
            self.nx * self.ny,
            "field length does not match grid"
        );
        let x = self.apply_x(&self.x.d1, v, exec);
        let xy = self.apply_y(&self.y.d1, &x, exec);
        Partials {
            y: self.apply_y(&self.y.d1, v, exec),
            xx: self.apply_x(&self.x.d2, v, exec),
            yy: self.apply_y(&self.y.d2, v, exec),
            xy,
            x,
        }
    }

    /// `∂_z̄` of a complex field, evaluated at every node.
    pub fn dzbar_complex(&self, q: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = q.iter().map(|c| c.re).collect();
        let im: Vec<f64> = q.iter().map(|c| c.im).collect();
        let exec = Exec::default();
        let (rx, ry) = (
            self.apply_x(&self.x.d1, &re, exec),
            self.apply_y(&self.y.d1, &re, exec),
        );
        let (ix, iy) = (
            self.apply_x(&self.x.d1, &im, exec),
            self.apply_y(&self.y.d1, &im, exec),
        );
        // ∂_z̄ = (∂_x + i∂_y)/2 applied to re + i·im.
        (0..q.len())
            .map(|p| Complex64::new(0.5 * (rx[p] - iy[p]), 0.5 * (ry[p] + ix[p])))
            .collect()
    }

    /// `∂_z` of a complex field, evaluated at every node.
    pub fn dz_complex(&self, q: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = q.iter().map(|c| c.re).collect();
        let im: Vec<f64> = q.iter().map(|c| c.im).collect();
        let exec = Exec::default();
        let (rx, ry) = (
            self.apply_x(&self.x.d1, &re, exec),
            self.apply_y(&self.y.d1, &re, exec),
        );
        let (ix, iy) = (
            self.apply_x(&self.x.d1, &im, exec),
            self.apply_y(&self.y.d1, &im, exec),
        );
        (0..q.len())
            .map(|p| Complex64::new(0.5 * (rx[p] + iy[p]), 0.5 * (ix[p] - ry[p])))
            .collect()
    }

    /// Every neighbor touched by the derivative stencils at node `p`, with
    /// its weight in each of the operators `[x, y, xx, yy, xy]`.
    pub fn taps(&self, p: usize) -> Vec<(usize, TapWeights)> {
        let nx = self.nx;
        let (i, j) = (p % nx, p / nx);
        let mut acc: BTreeMap<usize, TapWeights> = BTreeMap::new();
        for &(a, w) in &self.x.d1[i] {
            acc.entry(j * nx + a).or_default()[0] += w;
        }
        for &(b, w) in &self.y.d1[j] {
            acc.entry(b * nx + i).or_default()[1] += w;
        }
        for &(a, w) in &self.x.d2[i] {
            acc.entry(j * nx + a).or_default()[2] += w;
        }
        for &(b, w) in &self.y.d2[j] {
            acc.entry(b * nx + i).or_default()[3] += w;
        }
        for &(a, wa) in &self.x.d1[i] {
            for &(b, wb) in &self.y.d1[j] {
                acc.entry(b * nx + a).or_default()[4] += wa * wb;
            }
        }
        acc.into_iter().collect()
    }
}
