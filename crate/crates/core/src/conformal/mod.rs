//! Conformal metrics on complex charts and the tensors built from them.

mod field;
mod grid;
mod maps;
mod quad;
mod stencil;
mod tensor;

pub use field::{
    ConformalMetricField, DiskMetric, FlatMetric, HalfPlaneMetric, Jet1, Jet2, LogDensity,
    PlaneWave, Provenance, Pullback, Scaled, StripMetric, Waves,
};
pub use grid::{ChartGrid, MIN_NODES};
pub use maps::{compose, Affine, Compose, Exp, HolomorphicMap, Jet3, Koebe, Log, Power, Sqrt};
pub use quad::{schwarzian_map, QuadDifferential};
pub use stencil::{fd_weights, DiffOps, Partials, TapWeights};
pub use tensor::{l2_norm, pairing, tensor_algebra, SymTwoTensor, TensorAlgebra, TensorValue};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `K = −4 e^{−2η} η_zz̄` at one node.
pub fn curvature_at(jet: &Jet2) -> f64 {
    -4.0 * (-2.0 * jet.eta).exp() * jet.eta_zzbar
}

/// Gaussian curvature of `σ` at every node.
pub fn gauss_curvature(sigma: &ConformalMetricField) -> Vec<f64> {
    (0..sigma.grid().len())
        .map(|p| curvature_at(&sigma.jet2(p)))
        .collect()
}

/// `η₂_zz − η₂_z² − η₁_zz + η₁_z²` at one node.
pub fn schwarzian_b_at(s1: &Jet2, s2: &Jet2) -> Complex64 {
    s2.eta_zz - s2.eta_z * s2.eta_z - s1.eta_zz + s1.eta_z * s1.eta_z
}

/// Schwarzian `B(σ₁, σ₂)` of `σ₂` relative to `σ₁`.
#[allow(non_snake_case)]
pub fn schwarzian_B(
    sigma1: &ConformalMetricField,
    sigma2: &ConformalMetricField,
) -> Result<QuadDifferential> {
    if sigma1.grid() != sigma2.grid() {
        return Err(Error::GridMismatch);
    }
    let q = (0..sigma1.grid().len())
        .map(|p| schwarzian_b_at(&sigma1.jet2(p), &sigma2.jet2(p)))
        .collect();
    QuadDifferential::new(sigma1.grid(), q)
}
