//! Scaled k-surface and constant-mean-curvature equations on model surfaces
//! and their solution by Newton continuation in `k`.
//!
//! A metric `τ = e^{2u} h` conformal to the hyperbolic metric solves the
//! scaled k-surface equation `F(k, τ) = 0` exactly when `σ = c(k) τ` has an
//! Epstein surface of constant curvature `k`, and the scaled CMC equation
//! `G(k, τ) = 0` exactly when that surface has mean curvature `−√(1+k)`.
//! Schwarzians are intrinsic: `B(τ) = φ/2 + B(h, τ)`.

mod newton;
mod surface;

pub use newton::{
    continuation, newton_solve, unscale, BranchSample, FoliationBranch, NewtonReport,
};
pub use surface::{
    gudermannian, DevelopingMap, ModelSurface, PhiSpec, SurfaceKind, SurfaceSpec, NEHARI_BOUND,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{curvature_at, schwarzian_b_at, ConformalMetricField, QuadDifferential};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};

/// Which curvature condition the surfaces satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Constant Gaussian curvature `k`.
    KSurface,
    /// Constant mean curvature `−√(1+k)`.
    Cmc,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::KSurface => "k-surface",
            Mode::Cmc => "cmc",
        }
    }
}

/// Newton and continuation settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Sup-norm of the residual at which Newton stops.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Largest step in `k` between consecutive continuation solves.
    pub k_step: f64,
    /// Relative sup-norm residual accepted from the linear solve.
    pub linear_solver_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_iter: 30,
            k_step: 0.05,
            linear_solver_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) || !self.newton_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "newton_tol must be > 0, got {}",
                self.newton_tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.k_step > 0.0) || !self.k_step.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "k_step must be > 0, got {}",
                self.k_step
            )));
        }
        if !(self.linear_solver_tol > 0.0) || !self.linear_solver_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "linear_solver_tol must be > 0, got {}",
                self.linear_solver_tol
            )));
        }
        Ok(())
    }
}

fn check_open_unit(k: f64) -> Result<()> {
    if !(k > -1.0 && k < 0.0) {
        return Err(Error::Domain {
            name: "k",
            value: k,
            expected: "(-1, 0)",
        });
    }
    Ok(())
}

/// `c(k) = (1 + √(1+k)) / (1 − √(1+k))`, the scale with `K(I(c h)) = k`.
pub fn c_of_k(k: f64) -> Result<f64> {
    check_open_unit(k)?;
    let s = (1.0 + k).sqrt();
    Ok((1.0 + s) / (1.0 - s))
}

/// `(1 − √(1+k)) / (1 + √(1+k)) = 1/c(k)`.
pub fn f_cmc(k: f64) -> Result<f64> {
    check_open_unit(k)?;
    let s = (1.0 + k).sqrt();
    Ok((1.0 - s) / (1.0 + s))
}

/// Scaled metric `τ = f(k)σ` turned back into `σ_k = c(k) τ`. Both modes
/// share the same scaling.
pub fn unscale_factor(_mode: Mode, k: f64) -> Result<f64> {
    c_of_k(k)
}

/// `B(τ) = φ/2 + B(h, τ)`.
#[allow(non_snake_case)]
pub fn intrinsic_B(tau: &ConformalMetricField, surface: &ModelSurface) -> Result<QuadDifferential> {
    let h = surface.h();
    if tau.grid() != h.grid() {
        return Err(Error::GridMismatch);
    }
    let phi = surface.phi().values();
    QuadDifferential::new(
        h.grid(),
        (0..h.grid().len())
            .map(|p| 0.5 * phi[p] + schwarzian_b_at(&h.jet2(p), &tau.jet2(p)))
            .collect(),
    )
}

fn check_k(k: f64) -> Result<f64> {
    if !(k > -1.0) || !k.is_finite() {
        return Err(Error::Domain {
            name: "k",
            value: k,
            expected: "(-1, ∞)",
        });
    }
    Ok((1.0 + k).sqrt())
}

/// Pointwise data of one residual evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PointResidual {
    pub value: f64,
    /// `∂R/∂K`.
    pub d_curv: f64,
    /// `∂R/∂b` with `b = |B|²/τ²`.
    pub d_bnorm: f64,
    pub curvature: f64,
    pub b: Complex64,
    pub bnorm: f64,
}

pub(crate) fn point_residual(
    mode: Mode,
    k: f64,
    s: f64,
    curv: f64,
    b: Complex64,
    eta: f64,
) -> PointResidual {
    let bnorm = b.norm_sqr() * (-4.0 * eta).exp();
    let (value, d_curv, d_bnorm) = match mode {
        Mode::KSurface => {
            let a = 1.0 + curv;
            let beta = 16.0 * (2.0 * s - 2.0 - k);
            (
                (2.0 + k) * a * a + 2.0 * s * (1.0 - curv * curv) + beta * bnorm,
                2.0 * (2.0 + k) * a - 4.0 * s * curv,
                beta,
            )
        }
        Mode::Cmc => (
            1.0 + s + 2.0 * s * curv + (s - 1.0) * (curv * curv - 16.0 * bnorm),
            2.0 * s + 2.0 * (s - 1.0) * curv,
            -16.0 * (s - 1.0),
        ),
    };
    PointResidual {
        value,
        d_curv,
        d_bnorm,
        curvature: curv,
        b,
        bnorm,
    }
}

pub(crate) fn residual_points(
    mode: Mode,
    k: f64,
    tau: &ConformalMetricField,
    surface: &ModelSurface,
    exec: Exec,
) -> Result<Vec<PointResidual>> {
    let s = check_k(k)?;
    let h = surface.h();
    if tau.grid() != h.grid() {
        return Err(Error::GridMismatch);
    }
    let phi = surface.phi().values();
    Ok(map_range(exec, h.grid().len(), |p| {
        let jt = tau.jet2(p);
        let b = 0.5 * phi[p] + schwarzian_b_at(&h.jet2(p), &jt);
        point_residual(mode, k, s, curvature_at(&jt), b, jt.eta)
    }))
}

/// Selected residual at every node.
pub fn residual(
    mode: Mode,
    k: f64,
    tau: &ConformalMetricField,
    surface: &ModelSurface,
) -> Result<Vec<f64>> {
    Ok(residual_points(mode, k, tau, surface, Exec::default())?
        .into_iter()
        .map(|r| r.value)
        .collect())
}

/// `F(k, τ) = (2+k)(1+K)² + 2√(1+k)(1−K²) + 16(2√(1+k) − 2 − k)|B|²/τ²`.
#[allow(non_snake_case)]
pub fn residual_F(k: f64, tau: &ConformalMetricField, surface: &ModelSurface) -> Result<Vec<f64>> {
    residual(Mode::KSurface, k, tau, surface)
}

/// `G(k, τ) = 1 + √(1+k) + 2√(1+k)K + (√(1+k) − 1)(K² − 16|B|²/τ²)`.
#[allow(non_snake_case)]
pub fn residual_G(k: f64, tau: &ConformalMetricField, surface: &ModelSurface) -> Result<Vec<f64>> {
    residual(Mode::Cmc, k, tau, surface)
}

/// Derivative of `K(e^{2su} τ)` at `s = 0`:
/// `−4e^{−2η} ∂_z∂_z̄u − 2uK`, which is `2u − Δ_h u` at `τ = h`.
pub fn linearize_curvature(tau: &ConformalMetricField, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != tau.grid().len() {
        return Err(Error::GridMismatch);
    }
    let d = crate::conformal::DiffOps::new(tau.grid()).partials(u);
    Ok((0..u.len())
        .map(|p| {
            let j = tau.jet2(p);
            -4.0 * (-2.0 * j.eta).exp() * d.dzzbar(p) - 2.0 * u[p] * curvature_at(&j)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::gauss_curvature;
    use std::f64::consts::PI;

    fn cyl(phi: PhiSpec) -> ModelSurface {
        ModelSurface::new(SurfaceSpec::cylinder(2.0 * PI, 3.0, 32, 24, phi)).unwrap()
    }

    fn fourier(a: f64) -> PhiSpec {
        PhiSpec::Fourier {
            amplitude: Complex64::new(a, 0.0),
            mode: 0,
        }
    }

    #[test]
    fn scaling_functions() {
        assert!((c_of_k(-0.75).unwrap() - 3.0).abs() < 1e-14);
        assert!((f_cmc(-0.75).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((c_of_k(-1.0 + 1e-12).unwrap() - 1.0).abs() < 1e-5);
        let k = -0.01;
        let series = -4.0 / k - 2.0;
        assert!((c_of_k(k).unwrap() - series).abs() < 0.01 * series);
        for k in [-0.9, -0.5, -0.1, -1e-3] {
            assert!((f_cmc(k).unwrap() * c_of_k(k).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(c_of_k(0.0).is_err());
        assert!(f_cmc(-1.0).is_err());
    }

    #[test]
    fn intrinsic_b_at_h_is_half_phi() {
        let s = cyl(fourier(0.1));
        let b = intrinsic_B(s.h(), &s).unwrap();
        for (x, y) in b.values().iter().zip(s.phi().values()) {
            assert!((x - 0.5 * y).norm() < 1e-15);
        }
    }

    #[test]
    fn residuals_vanish_at_origin_and_on_fuchsian_data() {
        let s = cyl(fourier(0.3));
        assert!(residual_F(0.0, s.h(), &s)
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-12));
        assert!(residual_G(0.0, s.h(), &s)
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-12));
        let f = cyl(PhiSpec::Zero);
        for k in [-0.9, -0.5, -0.01, 0.5] {
            assert!(residual_F(k, f.h(), &f)
                .unwrap()
                .iter()
                .all(|v| v.abs() < 1e-12));
            assert!(residual_G(k, f.h(), &f)
                .unwrap()
                .iter()
                .all(|v| v.abs() < 1e-12));
        }
        assert!(residual_F(-1.0, f.h(), &f).is_err());
    }

    #[test]
    fn linearization_of_constant_direction() {
        let s = cyl(PhiSpec::Zero);
        let u = vec![0.5; s.grid().len()];
        let d = linearize_curvature(s.h(), &u).unwrap();
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-9));
        let zero = linearize_curvature(s.h(), &vec![0.0; s.grid().len()]).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linearization_matches_difference_quotient() {
        let s = cyl(fourier(0.1));
        let g = s.grid();
        let u: Vec<f64> = (0..g.len())
            .map(|p| {
                let z = g.point_at(p);
                0.3 * z.re.sin() * z.im.cos() + 0.1 * z.im
            })
            .collect();
        let tau = s
            .h()
            .perturbed(&u.iter().map(|v| 0.2 * v).collect::<Vec<_>>())
            .unwrap();
        let lin = linearize_curvature(&tau, &u).unwrap();
        let step = 1e-5;
        let shifted = |sgn: f64| {
            let w: Vec<f64> = u.iter().map(|v| sgn * step * v).collect();
            gauss_curvature(&tau.perturbed(&w).unwrap())
        };
        let (kp, km) = (shifted(1.0), shifted(-1.0));
        for p in 0..g.len() {
            let fd = (kp[p] - km[p]) / (2.0 * step);
            assert!((fd - lin[p]).abs() < 1e-6, "{fd} vs {}", lin[p]);
        }
    }
}
