//! Upper half-space model of hyperbolic 3-space.
//!
//! Points are `(z, t)` with `z` complex and `t > 0`; the ideal boundary is the
//! Riemann sphere, represented by [`IdealPoint`] with an explicit point at
//! infinity. Möbius transformations act on both through the Poincaré
//! extension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-300;

/// A unit-determinant 2×2 complex matrix acting by Möbius transformations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MobiusTransform {
    /// Builds the transformation `z ↦ (az+b)/(cz+d)`, rescaling the entries so
    /// the determinant is exactly one up to rounding.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || det.norm() <= DET_TOL {
            return Err(Error::SingularMobius(det.norm()));
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z ↦ z + w`.
    pub fn translation(w: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            a: one,
            b: w,
            c: Complex64::new(0.0, 0.0),
            d: one,
        }
    }

    /// `z ↦ λ z` for nonzero complex `λ`.
    pub fn dilation(lambda: Complex64) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(lambda, zero, zero, Complex64::new(1.0, 0.0))
    }

    /// `z ↦ -1/z`.
    pub fn inversion() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: zero,
            b: -one,
            c: one,
            d: zero,
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · other`, i.e. the map `self ∘ other`.
    pub fn compose(&self, other: &MobiusTransform) -> MobiusTransform {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // Product of unit-determinant matrices is never singular.
        Self::new(a, b, c, d).expect("product of SL(2,C) elements")
    }

    pub fn inverse(&self) -> MobiusTransform {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Complex derivative `1/(cz+d)²` at a finite point.
    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (den * den).inv()
    }

    /// Applies the transformation to an interior or ideal point.
    pub fn apply<P: MobiusAction>(&self, x: &P) -> P {
        x.act(self)
    }
}

/// Anything a Möbius transformation acts on.
pub trait MobiusAction: Sized {
    fn act(&self, m: &MobiusTransform) -> Self;
}

/// Free-function form of [`MobiusTransform::apply`].
pub fn mobius_apply<P: MobiusAction>(m: &MobiusTransform, x: &P) -> P {
    x.act(m)
}

/// A point `(z, t)` of upper half-space, `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfSpacePoint {
    z: Complex64,
    t: f64,
}

impl UpperHalfSpacePoint {
    pub fn new(z: Complex64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() || !z.is_finite() {
            return Err(Error::InvalidPoint(format!(
                "upper half-space point needs finite z and t > 0, got z = {z}, t = {t}"
            )));
        }
        Ok(Self { z, t })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Unchecked constructor for formulas that produce `t > 0` by construction.
    pub(crate) fn from_parts(z: Complex64, t: f64) -> Self {
        debug_assert!(t > 0.0, "height must be positive, got {t}");
        Self { z, t }
    }
}

impl MobiusAction for UpperHalfSpacePoint {
    fn act(&self, m: &MobiusTransform) -> Self {
        // Poincaré extension of z ↦ (az+b)/(cz+d) to (z, t).
        let [a, b, c, d] = m.entries();
        let w = c * self.z + d;
        let t2 = self.t * self.t;
        let den = w.norm_sqr() + c.norm_sqr() * t2;
        let z = ((a * self.z + b) * w.conj() + a * c.conj() * t2) / den;
        Self::from_parts(z, self.t / den)
    }
}

/// A point of the ideal boundary `ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint {
    Finite(Complex64),
    Infinity,
}

impl IdealPoint {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            IdealPoint::Finite(z) => Some(*z),
            IdealPoint::Infinity => None,
        }
    }
}

impl From<Complex64> for IdealPoint {
    fn from(z: Complex64) -> Self {
        IdealPoint::Finite(z)
    }
}

impl MobiusAction for IdealPoint {
    fn act(&self, m: &MobiusTransform) -> Self {
        let [a, b, c, d] = m.entries();
        match self {
            IdealPoint::Finite(z) => {
                let den = c * z + d;
                if den == Complex64::new(0.0, 0.0) {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((a * z + b) / den)
                }
            }
            IdealPoint::Infinity => {
                if c == Complex64::new(0.0, 0.0) {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(a / c)
                }
            }
        }
    }
}

/// Hyperbolic distance between two points of upper half-space.
///
/// Evaluated as `2 asinh(r / (2√(t_p t_q)))` with `r` the Euclidean distance,
/// which equals `arccosh(1 + r²/(2 t_p t_q))` and keeps full relative accuracy
/// for nearby points.
pub fn hyp_distance(p: &UpperHalfSpacePoint, q: &UpperHalfSpacePoint) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dt = p.t - q.t;
    let r = (dz + dt * dt).sqrt();
    2.0 * (r / (2.0 * (p.t * q.t).sqrt())).asinh()
}

/// The point at signed distance `t` from `p` along the geodesic from `p`
/// toward the ideal point `xi`.
pub fn geodesic_flow(p: &UpperHalfSpacePoint, xi: &IdealPoint, t: f64) -> UpperHalfSpacePoint {
    match xi {
        IdealPoint::Infinity => UpperHalfSpacePoint::from_parts(p.z, p.t * t.exp()),
        IdealPoint::Finite(w) => {
            // Move xi to ∞ with z ↦ -1/(z - w), flow vertically, move back.
            let to_inf = MobiusTransform::inversion().compose(&MobiusTransform::translation(-*w));
            let q = to_inf.apply(p);
            let flowed = UpperHalfSpacePoint::from_parts(q.z, q.t * t.exp());
            to_inf.inverse().apply(&flowed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_fixes_ideal_points() {
        let m = MobiusTransform::identity();
        assert_eq!(
            m.apply(&IdealPoint::Finite(c(1.0, 1.0))),
            IdealPoint::Finite(c(1.0, 1.0))
        );
        assert_eq!(m.apply(&IdealPoint::Infinity), IdealPoint::Infinity);
    }

    #[test]
    fn translation_preserves_height() {
        let w = c(0.3, -1.2);
        let p = UpperHalfSpacePoint::new(c(1.0, 2.0), 0.7).unwrap();
        let q = MobiusTransform::translation(w).apply(&p);
        assert!((q.z() - (p.z() + w)).norm() < 1e-15);
        assert!((q.t() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn infinity_handling() {
        let m = MobiusTransform::inversion();
        assert_eq!(
            m.apply(&IdealPoint::Finite(c(0.0, 0.0))),
            IdealPoint::Infinity
        );
        assert_eq!(
            m.apply(&IdealPoint::Infinity),
            IdealPoint::Finite(c(0.0, 0.0))
        );
    }

    #[test]
    fn rejects_nonpositive_height() {
        assert!(UpperHalfSpacePoint::new(c(0.0, 0.0), 0.0).is_err());
        assert!(UpperHalfSpacePoint::new(c(0.0, 0.0), -1.0).is_err());
        assert!(UpperHalfSpacePoint::new(c(0.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn rejects_singular_matrix() {
        let one = c(1.0, 0.0);
        assert!(MobiusTransform::new(one, one, one, one).is_err());
    }

    #[test]
    fn vertical_geodesic_distance() {
        let p = UpperHalfSpacePoint::new(c(0.0, 0.0), 1.0).unwrap();
        let q = UpperHalfSpacePoint::new(c(0.0, 0.0), std::f64::consts::E).unwrap();
        assert!((hyp_distance(&p, &q) - 1.0).abs() < 1e-15);
        assert_eq!(hyp_distance(&p, &p), 0.0);
    }

    #[test]
    fn flow_along_vertical_geodesics() {
        let p = UpperHalfSpacePoint::new(c(0.0, 0.0), 1.0).unwrap();
        let up = geodesic_flow(&p, &IdealPoint::Infinity, 0.8);
        assert!((up.t() - 0.8f64.exp()).abs() < 1e-14 && up.z().norm() == 0.0);
        let down = geodesic_flow(&p, &IdealPoint::Finite(c(0.0, 0.0)), 0.8);
        assert!((down.t() - (-0.8f64).exp()).abs() < 1e-14);
        assert!(down.z().norm() < 1e-15);
    }
}
