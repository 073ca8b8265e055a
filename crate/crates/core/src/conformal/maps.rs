//! Holomorphic maps given by their 3-jets.

use num_complex::Complex64;

use crate::hyp3::MobiusTransform;

/// `[f, f′, f″, f‴]` at a point.
pub type Jet3 = [Complex64; 4];

/// A holomorphic map that can report its value and first three derivatives.
pub trait HolomorphicMap: Sync {
    fn jet3(&self, z: Complex64) -> Jet3;
}

impl<F> HolomorphicMap for F
where
    F: Fn(Complex64) -> Jet3 + Sync,
{
    fn jet3(&self, z: Complex64) -> Jet3 {
        self(z)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl HolomorphicMap for MobiusTransform {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let [a, b, cc, d] = self.entries();
        let w = cc * z + d;
        let w2 = w * w;
        // det = 1, so f' = 1/w², f'' = -2c/w³, f''' = 6c²/w⁴.
        [
            (a * z + b) / w,
            w2.inv(),
            -c(2.0) * cc / (w2 * w),
            c(6.0) * cc * cc / (w2 * w2),
        ]
    }
}

/// Principal logarithm.
#[derive(Clone, Copy, Debug, Default)]
pub struct Log;

impl HolomorphicMap for Log {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let r = z.inv();
        [z.ln(), r, -r * r, c(2.0) * r * r * r]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Exp;

impl HolomorphicMap for Exp {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let e = z.exp();
        [e, e, e, e]
    }
}

/// `z ↦ z^n` for a nonnegative integer `n`.
#[derive(Clone, Copy, Debug)]
pub struct Power(pub u32);

impl HolomorphicMap for Power {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let n = self.0 as i32;
        let p = |k: i32| -> Complex64 {
            if n - k < 0 {
                c(0.0)
            } else {
                z.powi(n - k)
            }
        };
        let nf = n as f64;
        [
            p(0),
            c(nf) * p(1),
            c(nf * (nf - 1.0)) * p(2),
            c(nf * (nf - 1.0) * (nf - 2.0)) * p(3),
        ]
    }
}

/// Principal square root.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sqrt;

impl HolomorphicMap for Sqrt {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let s = z.sqrt();
        let d1 = c(0.5) / s;
        let d2 = -c(0.25) / (s * z);
        let d3 = c(0.375) / (s * z * z);
        [s, d1, d2, d3]
    }
}

/// Koebe function `z/(1−z)²`, univalent on the unit disk.
#[derive(Clone, Copy, Debug, Default)]
pub struct Koebe;

impl HolomorphicMap for Koebe {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let w = c(1.0) - z;
        let w2 = w * w;
        let w3 = w2 * w;
        // k = 1/w² − 1/w, so k' = 2/w³ − 1/w², k'' = 6/w⁴ − 2/w³, k''' = 24/w⁵ − 6/w⁴.
        [
            z / w2,
            c(2.0) / w3 - w2.inv(),
            c(6.0) / (w3 * w) - c(2.0) / w3,
            c(24.0) / (w3 * w2) - c(6.0) / (w3 * w),
        ]
    }
}

/// Affine map `z ↦ a z + b`.
#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub a: Complex64,
    pub b: Complex64,
}

impl HolomorphicMap for Affine {
    fn jet3(&self, z: Complex64) -> Jet3 {
        [self.a * z + self.b, self.a, c(0.0), c(0.0)]
    }
}

/// `outer ∘ inner`, with derivatives by the chain rule (Faà di Bruno).
#[derive(Clone, Copy, Debug)]
pub struct Compose<F, G> {
    pub outer: F,
    pub inner: G,
}

impl<F: HolomorphicMap, G: HolomorphicMap> HolomorphicMap for Compose<F, G> {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let [g, g1, g2, g3] = self.inner.jet3(z);
        let [f, f1, f2, f3] = self.outer.jet3(g);
        [
            f,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1 * g1 * g1 + c(3.0) * f2 * g1 * g2 + f1 * g3,
        ]
    }
}

pub fn compose<F: HolomorphicMap, G: HolomorphicMap>(outer: F, inner: G) -> Compose<F, G> {
    Compose { outer, inner }
}
