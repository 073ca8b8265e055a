use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::ChartGrid;
use super::maps::HolomorphicMap;
use super::stencil::DiffOps;
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};

/// Log density and its first derivative at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet1 {
    pub eta: f64,
    pub eta_z: Complex64,
}

/// Log density with the derivatives the curvature and Schwarzian need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub eta: f64,
    pub eta_z: Complex64,
    pub eta_zz: Complex64,
    pub eta_zzbar: f64,
}

impl Jet2 {
    pub fn jet1(&self) -> Jet1 {
        Jet1 {
            eta: self.eta,
            eta_z: self.eta_z,
        }
    }

    /// Jet of `e^{2s} σ`.
    pub fn shifted(mut self, s: f64) -> Self {
        self.eta += s;
        self
    }
}

/// A conformal metric `e^{2η}|dz|²` known in closed form.
pub trait LogDensity: Sync {
    fn jet(&self, z: Complex64) -> Jet2;
}

impl<F> LogDensity for F
where
    F: Fn(Complex64) -> Jet2 + Sync,
{
    fn jet(&self, z: Complex64) -> Jet2 {
        self(z)
    }
}

/// `|dz|²` scaled by a constant: `η ≡ eta`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlatMetric {
    pub eta: f64,
}

impl LogDensity for FlatMetric {
    fn jet(&self, _z: Complex64) -> Jet2 {
        Jet2 {
            eta: self.eta,
            eta_z: Complex64::new(0.0, 0.0),
            eta_zz: Complex64::new(0.0, 0.0),
            eta_zzbar: 0.0,
        }
    }
}

/// Poincaré metric `|dz|²/y²` on the upper half-plane.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfPlaneMetric;

impl LogDensity for HalfPlaneMetric {
    fn jet(&self, z: Complex64) -> Jet2 {
        let y = z.im;
        Jet2 {
            eta: -y.ln(),
            eta_z: Complex64::new(0.0, 0.5 / y),
            eta_zz: Complex64::new(-0.25 / (y * y), 0.0),
            eta_zzbar: 0.25 / (y * y),
        }
    }
}

/// Poincaré metric `4|dz|²/(1−|z|²)²` on the unit disk.
#[derive(Clone, Copy, Debug, Default)]
pub struct DiskMetric;

impl LogDensity for DiskMetric {
    fn jet(&self, z: Complex64) -> Jet2 {
        let w = 1.0 - z.norm_sqr();
        Jet2 {
            eta: std::f64::consts::LN_2 - w.ln(),
            eta_z: z.conj() / w,
            eta_zz: z.conj() * z.conj() / (w * w),
            eta_zzbar: 1.0 / (w * w),
        }
    }
}

/// Hyperbolic metric `|dz|²/cos²(y)` on the strip `|y| < π/2`.
///
/// This is the hyperbolic cylinder in Fermi coordinates about its core
/// geodesic `y = 0`; the signed distance from the core is `gd⁻¹(y)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StripMetric;

impl LogDensity for StripMetric {
    fn jet(&self, z: Complex64) -> Jet2 {
        let (s, cs) = z.im.sin_cos();
        let sec2 = 1.0 / (cs * cs);
        Jet2 {
            eta: -cs.ln(),
            eta_z: Complex64::new(0.0, -0.5 * s / cs),
            eta_zz: Complex64::new(-0.25 * sec2, 0.0),
            eta_zzbar: 0.25 * sec2,
        }
    }
}

/// `c · σ` for a positive constant `c`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<L> {
    pub inner: L,
    pub factor: f64,
}

impl<L: LogDensity> LogDensity for Scaled<L> {
    fn jet(&self, z: Complex64) -> Jet2 {
        self.inner.jet(z).shifted(0.5 * self.factor.ln())
    }
}

/// One term `A cos(p x + q y + c)` of a smooth perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub amplitude: f64,
    pub p: f64,
    pub q: f64,
    pub phase: f64,
}

/// `e^{2u} σ` with `u` a finite sum of plane waves, all derivatives exact.
#[derive(Clone, Debug)]
pub struct Waves<L> {
    pub base: L,
    pub waves: Vec<PlaneWave>,
}

impl<L: LogDensity> LogDensity for Waves<L> {
    fn jet(&self, z: Complex64) -> Jet2 {
        let mut j = self.base.jet(z);
        for w in &self.waves {
            let (s, c) = (w.p * z.re + w.q * z.im + w.phase).sin_cos();
            // ∂_z acts on the phase as (p − iq)/2.
            let k = Complex64::new(0.5 * w.p, -0.5 * w.q);
            j.eta += w.amplitude * c;
            j.eta_z -= k * (w.amplitude * s);
            j.eta_zz -= k * k * (w.amplitude * c);
            j.eta_zzbar -= k.norm_sqr() * w.amplitude * c;
        }
        j
    }
}

/// Pullback `g*σ` of a metric by a holomorphic map.
///
/// `η̃ = η∘g + ln|g′|`; the harmonic term `ln|g′|` contributes to `η̃_z` and
/// `η̃_zz` but not to `η̃_zz̄`.
#[derive(Clone, Copy, Debug)]
pub struct Pullback<L, G> {
    pub metric: L,
    pub map: G,
}

impl<L: LogDensity, G: HolomorphicMap> LogDensity for Pullback<L, G> {
    fn jet(&self, z: Complex64) -> Jet2 {
        let [g, g1, g2, g3] = self.map.jet3(z);
        let j = self.metric.jet(g);
        let r = g2 / g1;
        Jet2 {
            eta: j.eta + g1.norm().ln(),
            eta_z: j.eta_z * g1 + 0.5 * r,
            eta_zz: j.eta_zz * g1 * g1 + j.eta_z * g2 + 0.5 * (g3 / g1 - r * r),
            eta_zzbar: j.eta_zzbar * g1.norm_sqr(),
        }
    }
}

/// Where the derivatives of a [`ConformalMetricField`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Exact derivatives from a closed-form log density.
    Analytic,
    /// Finite differences of sampled log-density values.
    FiniteDifference,
    /// Analytic base plus a finite-difference perturbation.
    Perturbed,
}

/// A conformal metric `σ = e^{2η}|dz|²` sampled on a chart grid, with the
/// derivatives `η_z`, `η_zz` and `η_zz̄` at every node.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetricField {
    grid: ChartGrid,
    eta: Vec<f64>,
    eta_z: Vec<Complex64>,
    eta_zz: Vec<Complex64>,
    eta_zzbar: Vec<f64>,
    provenance: Provenance,
}

/// Number of nodes at which a closure's derivatives are cross-checked.
const CLOSURE_SAMPLES: usize = 16;

impl ConformalMetricField {
    pub fn from_closure<L: LogDensity + ?Sized>(grid: &ChartGrid, density: &L) -> Result<Self> {
        Self::from_closure_with(grid, density, Exec::default())
    }

    /// Samples a closed-form metric. A handful of nodes are checked against
    /// 4th-order differences of the closure itself, so a closure whose
    /// derivatives disagree with its values is rejected.
    pub fn from_closure_with<L: LogDensity + ?Sized>(
        grid: &ChartGrid,
        density: &L,
        exec: Exec,
    ) -> Result<Self> {
        let jets = map_range(exec, grid.len(), |p| density.jet(grid.point_at(p)));
        for (p, j) in jets.iter().enumerate() {
            let finite = j.eta.is_finite()
                && j.eta_z.is_finite()
                && j.eta_zz.is_finite()
                && j.eta_zzbar.is_finite();
            if !finite {
                return Err(Error::InvalidGrid(format!(
                    "log density is not finite at z = {}",
                    grid.point_at(p)
                )));
            }
        }
        check_closure(grid, density)?;
        Ok(Self {
            grid: grid.clone(),
            eta: jets.iter().map(|j| j.eta).collect(),
            eta_z: jets.iter().map(|j| j.eta_z).collect(),
            eta_zz: jets.iter().map(|j| j.eta_zz).collect(),
            eta_zzbar: jets.iter().map(|j| j.eta_zzbar).collect(),
            provenance: Provenance::Analytic,
        })
    }

    /// Builds a metric from sampled log-density values, differentiating with
    /// the grid's finite-difference stencils.
    pub fn from_samples(grid: &ChartGrid, eta: Vec<f64>) -> Result<Self> {
        if eta.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let d = DiffOps::new(grid).partials(&eta);
        let n = grid.len();
        Ok(Self {
            grid: grid.clone(),
            eta_z: (0..n).map(|p| d.dz(p)).collect(),
            eta_zz: (0..n).map(|p| d.dzz(p)).collect(),
            eta_zzbar: (0..n).map(|p| d.dzzbar(p)).collect(),
            eta,
            provenance: Provenance::FiniteDifference,
        })
    }

    /// `e^{2u} σ`, with the derivatives of `u` taken by finite differences.
    pub fn perturbed(&self, u: &[f64]) -> Result<Self> {
        self.perturbed_with(u, &DiffOps::new(&self.grid))
    }

    /// As [`perturbed`](Self::perturbed), reusing prebuilt stencils.
    pub fn perturbed_with(&self, u: &[f64], ops: &DiffOps) -> Result<Self> {
        if u.len() != self.grid.len() {
            return Err(Error::GridMismatch);
        }
        let d = ops.partials(u);
        let n = self.grid.len();
        Ok(Self {
            grid: self.grid.clone(),
            eta: (0..n).map(|p| self.eta[p] + u[p]).collect(),
            eta_z: (0..n).map(|p| self.eta_z[p] + d.dz(p)).collect(),
            eta_zz: (0..n).map(|p| self.eta_zz[p] + d.dzz(p)).collect(),
            eta_zzbar: (0..n).map(|p| self.eta_zzbar[p] + d.dzzbar(p)).collect(),
            provenance: match self.provenance {
                Provenance::FiniteDifference => Provenance::FiniteDifference,
                _ => Provenance::Perturbed,
            },
        })
    }

    /// `c · σ` for a constant `c > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Domain {
                name: "scale factor",
                value: factor,
                expected: "(0, ∞)",
            });
        }
        let shift = 0.5 * factor.ln();
        let mut out = self.clone();
        out.eta.iter_mut().for_each(|e| *e += shift);
        Ok(out)
    }

    pub fn grid(&self) -> &ChartGrid {
        &self.grid
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }
    pub fn eta_z(&self) -> &[Complex64] {
        &self.eta_z
    }
    pub fn eta_zz(&self) -> &[Complex64] {
        &self.eta_zz
    }
    pub fn eta_zzbar(&self) -> &[f64] {
        &self.eta_zzbar
    }

    /// Conformal factor `e^{2η}` at a node.
    pub fn density(&self, p: usize) -> f64 {
        (2.0 * self.eta[p]).exp()
    }

    pub fn jet1(&self, p: usize) -> Jet1 {
        Jet1 {
            eta: self.eta[p],
            eta_z: self.eta_z[p],
        }
    }

    pub fn jet2(&self, p: usize) -> Jet2 {
        Jet2 {
            eta: self.eta[p],
            eta_z: self.eta_z[p],
            eta_zz: self.eta_zz[p],
            eta_zzbar: self.eta_zzbar[p],
        }
    }
}

fn check_closure<L: LogDensity + ?Sized>(grid: &ChartGrid, density: &L) -> Result<()> {
    let n = grid.len();
    let step = (n / CLOSURE_SAMPLES).max(1);
    let delta = 1e-3 * grid.hx().min(grid.hy());
    let tol = |v: Complex64| 1e-5 * (1.0 + v.norm());
    for p in (step / 2..n).step_by(step) {
        let z = grid.point_at(p);
        let j = density.jet(z);
        // 4th-order central differences in x and y.
        let d = |f: &dyn Fn(Complex64) -> Complex64, dir: Complex64| {
            let h = dir * delta;
            (f(z - 2.0 * h) - f(z - h) * 8.0 + f(z + h) * 8.0 - f(z + 2.0 * h)) / (12.0 * delta)
        };
        let ex = Complex64::new(1.0, 0.0);
        let ey = Complex64::new(0.0, 1.0);
        let eta = |w: Complex64| Complex64::new(density.jet(w).eta, 0.0);
        let eta_z = |w: Complex64| density.jet(w).eta_z;
        let dz = |f: &dyn Fn(Complex64) -> Complex64| 0.5 * (d(f, ex) - ey * d(f, ey));
        let dzbar = |f: &dyn Fn(Complex64) -> Complex64| 0.5 * (d(f, ex) + ey * d(f, ey));
        let checks = [
            (j.eta_z, dz(&eta)),
            (j.eta_zz, dz(&eta_z)),
            (Complex64::new(j.eta_zzbar, 0.0), dzbar(&eta_z)),
        ];
        for (stored, estimate) in checks {
            if !estimate.is_finite() {
                // Neighborhood leaves the closure's domain; nothing to compare.
                continue;
            }
            if (stored - estimate).norm() > tol(stored) {
                return Err(Error::ClosureMismatch {
                    z,
                    stored,
                    estimate,
                });
            }
        }
    }
    Ok(())
}
