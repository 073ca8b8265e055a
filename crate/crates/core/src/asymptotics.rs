//! Rescaled fundamental forms along a solved branch and their tangents at
//! the hyperbolic metric.
//!
//! With `ε = −k` and the scaling `f(ε) = 1/c(−ε)`, `f′(0) = 1/4`, the rescaled
//! forms are `I_ε = 4f′(0) ε I(σ)` and `II_ε = −4f′(0) ε II(σ)`, both tending
//! to `h`. Tangents are difference quotients `(T(ε) − h)/ε` extrapolated to
//! `ε = 0`. Coefficients are reported in the `k` direction, which is minus
//! the `ε` direction.

use serde::{Deserialize, Serialize};

use crate::conformal::{gauss_curvature, l2_norm, pairing, SymTwoTensor};
use crate::epstein::{first_form, second_form};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::foliation::{intrinsic_B, FoliationBranch, Mode, ModelSurface};

/// Derivative of the scaling function at `ε = 0`, in both modes.
pub const SCALING_DERIVATIVE: f64 = 0.25;

/// Rescaled forms of one branch member.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledForms {
    pub eps: f64,
    pub first: SymTwoTensor,
    pub second: SymTwoTensor,
}

pub fn rescaled_forms(
    branch: &FoliationBranch,
    surface: &ModelSurface,
) -> Result<Vec<RescaledForms>> {
    rescaled_forms_with(branch, surface, Exec::default())
}

pub fn rescaled_forms_with(
    branch: &FoliationBranch,
    surface: &ModelSurface,
    exec: Exec,
) -> Result<Vec<RescaledForms>> {
    for s in &branch.samples {
        if !(s.residual <= branch.newton_tol) {
            return Err(Error::Unconverged {
                k: s.k,
                residual: s.residual,
            });
        }
        if s.u.len() != surface.grid().len() {
            return Err(Error::GridMismatch);
        }
    }
    map_range(exec, branch.samples.len(), |i| {
        let eps = -branch.samples[i].k;
        let sigma = branch.sigma(i, surface)?;
        let b = intrinsic_B(&sigma, surface)?;
        let k = gauss_curvature(&sigma);
        let scale = 4.0 * SCALING_DERIVATIVE * eps;
        Ok(RescaledForms {
            eps,
            first: first_form(&sigma, &b, &k)?.scale(scale),
            second: second_form(&sigma, &b, &k)?.scale(-scale),
        })
    })
    .into_iter()
    .collect()
}

/// An extrapolated tangent tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentEstimate {
    pub tangent: SymTwoTensor,
    /// Degree of the extrapolating polynomial in `ε`.
    pub order: usize,
}

/// Lagrange weights of the interpolant through `xs`, evaluated at 0.
fn weights_at_zero(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            (0..xs.len())
                .filter(|&j| j != i)
                .map(|j| xs[j] / (xs[j] - xs[i]))
                .product()
        })
        .collect()
}

/// Tangent at `ε = 0` of a family with `T(0) = base`, from samples `(ε, T(ε))`.
///
/// The difference quotients `(T(ε) − base)/ε` are interpolated by a polynomial
/// through all samples and evaluated at `ε = 0`.
pub fn tangent_estimate(
    seq: &[(f64, &SymTwoTensor)],
    base: &SymTwoTensor,
) -> Result<TangentEstimate> {
    if seq.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "tangent extrapolation needs at least 3 samples, got {}",
            seq.len()
        )));
    }
    let eps: Vec<f64> = seq.iter().map(|(e, _)| *e).collect();
    for (i, e) in eps.iter().enumerate() {
        if !(*e > 0.0) || eps[..i].contains(e) {
            return Err(Error::InsufficientData(format!(
                "sample parameters must be distinct and positive, got {e}"
            )));
        }
    }
    let w = weights_at_zero(&eps);
    let mut acc = SymTwoTensor::zeros(base.grid());
    for ((e, t), wi) in seq.iter().zip(&w) {
        let quotient = t.checked_sub(base)?.scale(wi / e);
        acc = acc.checked_add(&quotient)?;
    }
    Ok(TangentEstimate {
        tangent: acc,
        order: seq.len() - 1,
    })
}

/// Components of a tensor along `Re φ`, `Im φ` and the pure-trace directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiCoefficient {
    pub c_re: f64,
    pub c_im: f64,
    pub trace_part_norm: f64,
    pub residual_norm: f64,
}

/// Least-squares coefficients of `T − (trace part)` on `{Re φ, Im φ}` in the
/// L²(h) pairing.
pub fn phi_coefficient(t: &SymTwoTensor, surface: &ModelSurface) -> Result<PhiCoefficient> {
    let h = surface.h();
    let trace = t.trace_part();
    let free = t.trace_free_part();
    let trace_part_norm = l2_norm(&trace, h)?;
    if surface.phi().is_zero() {
        return Ok(PhiCoefficient {
            c_re: 0.0,
            c_im: 0.0,
            trace_part_norm,
            residual_norm: l2_norm(&free, h)?,
        });
    }
    let re = SymTwoTensor::real_part(surface.phi());
    let im = SymTwoTensor::imag_part(surface.phi());
    let (g11, g12, g22) = (
        pairing(&re, &re, h)?,
        pairing(&re, &im, h)?,
        pairing(&im, &im, h)?,
    );
    let det = g11 * g22 - g12 * g12;
    if !(det > 1e-12 * g11 * g22) {
        return Err(Error::DegeneratePhi);
    }
    let (r1, r2) = (pairing(&free, &re, h)?, pairing(&free, &im, h)?);
    let c_re = (g22 * r1 - g12 * r2) / det;
    let c_im = (g11 * r2 - g12 * r1) / det;
    let rest = free
        .checked_sub(&re.scale(c_re))?
        .checked_sub(&im.scale(c_im))?;
    Ok(PhiCoefficient {
        c_re,
        c_im,
        trace_part_norm,
        residual_norm: l2_norm(&rest, h)?,
    })
}

/// L² residuals left after removing the φ-span and trace parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    #[serde(rename = "I")]
    pub first: f64,
    #[serde(rename = "II")]
    pub second: f64,
}

/// Predicted `Re φ` coefficients of `İ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    /// `−1`: derivative in `k`.
    pub k_direction: f64,
    /// `4f′(0) = 1`: derivative in `ε = −k`.
    pub eps_direction: f64,
}

/// Tangents of the rescaled forms at `ε = 0` and their `φ` components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    pub mode: Mode,
    /// Sampled `ε = −k`, strictly decreasing.
    pub eps_list: Vec<f64>,
    /// `Re φ` coefficient of `İ` in the `k` direction.
    #[serde(rename = "cI_re")]
    pub ci_re: f64,
    #[serde(rename = "cI_im")]
    pub ci_im: f64,
    #[serde(rename = "cII_re")]
    pub cii_re: f64,
    #[serde(rename = "cII_im")]
    pub cii_im: f64,
    pub residual_norms: ResidualNorms,
    pub extrapolation_order: usize,
    /// The same coefficients in the `ε` direction, `[cI_re, cI_im, cII_re, cII_im]`.
    pub eps_direction: [f64; 4],
    pub predicted_ci_re: Predictions,
    /// `sup |I_ε − h|_h` for each sample.
    pub deviation_i: Vec<f64>,
    /// `sup |II_ε − h|_h` for each sample.
    pub deviation_ii: Vec<f64>,
    /// Sign convention for the second form.
    pub convention: String,
}

pub fn verify_asymptotics(
    branch: &FoliationBranch,
    surface: &ModelSurface,
) -> Result<TangentReport> {
    let forms = rescaled_forms(branch, surface)?;
    if forms.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "asymptotics need at least 3 branch samples, got {}",
            forms.len()
        )));
    }
    let h = surface.h();
    let base = SymTwoTensor::from_metric(h);
    let seq_i: Vec<(f64, &SymTwoTensor)> = forms.iter().map(|f| (f.eps, &f.first)).collect();
    let seq_ii: Vec<(f64, &SymTwoTensor)> = forms.iter().map(|f| (f.eps, &f.second)).collect();
    let ti = tangent_estimate(&seq_i, &base)?;
    let tii = tangent_estimate(&seq_ii, &base)?;
    let pi = phi_coefficient(&ti.tangent, surface)?;
    let pii = phi_coefficient(&tii.tangent, surface)?;
    let deviation = |t: &SymTwoTensor| t.checked_sub(&base).and_then(|d| d.sup_norm(h));
    Ok(TangentReport {
        mode: branch.mode,
        eps_list: forms.iter().map(|f| f.eps).collect(),
        ci_re: -pi.c_re,
        ci_im: -pi.c_im,
        cii_re: -pii.c_re,
        cii_im: -pii.c_im,
        residual_norms: ResidualNorms {
            first: pi.residual_norm,
            second: pii.residual_norm,
        },
        extrapolation_order: ti.order,
        eps_direction: [pi.c_re, pi.c_im, pii.c_re, pii.c_im],
        predicted_ci_re: Predictions {
            k_direction: -1.0,
            eps_direction: 4.0 * SCALING_DERIVATIVE,
        },
        deviation_i: forms.iter().map(|f| deviation(&f.first)).collect::<Result<_>>()?,
        deviation_ii: forms.iter().map(|f| deviation(&f.second)).collect::<Result<_>>()?,
        convention: "II is negative definite as computed; II_eps = -eps*II(sigma) so that both rescaled forms tend to h"
            .into(),
    })
}
