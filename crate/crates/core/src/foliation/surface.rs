use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{
    gauss_curvature, schwarzian_b_at, ChartGrid, ConformalMetricField, DiffOps, DiskMetric,
    FlatMetric, HolomorphicMap, Jet3, LogDensity, QuadDifferential, StripMetric,
};
use crate::error::{Error, Result};

/// Coefficient of the quadratic differential `φ = q(z) dz²` in the surface chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PhiSpec {
    Zero,
    /// `a · exp(2πi n z / ℓ)` on a cylinder of core length `ℓ`.
    Fourier {
        amplitude: Complex64,
        mode: i32,
    },
    /// `Σ c_j z^j`.
    Polynomial {
        coeffs: Vec<Complex64>,
    },
}

impl PhiSpec {
    fn eval(&self, z: Complex64, period: f64) -> Complex64 {
        match self {
            PhiSpec::Zero => Complex64::new(0.0, 0.0),
            PhiSpec::Fourier { amplitude, mode } => {
                amplitude * (Complex64::new(0.0, 2.0 * PI * *mode as f64 / period) * z).exp()
            }
            PhiSpec::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
        }
    }
}

/// Which hyperbolic surface the chart grid resolves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceKind {
    /// The square `[−w, w]²` inside the Poincaré disk, `0 < w < 1/√2`.
    Disk { half_width: f64 },
    /// Hyperbolic cylinder with core geodesic of length `ell`, truncated at
    /// distance `r` from the core, in strip coordinates `|dz|²/cos²y`.
    Cylinder { ell: f64, r: f64 },
}

/// Parameters of a model surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub nx: usize,
    pub ny: usize,
    pub phi: PhiSpec,
}

impl SurfaceSpec {
    pub fn cylinder(ell: f64, r: f64, nx: usize, ny: usize, phi: PhiSpec) -> Self {
        Self {
            kind: SurfaceKind::Cylinder { ell, r },
            nx,
            ny,
            phi,
        }
    }

    pub fn disk(half_width: f64, n: usize, phi: PhiSpec) -> Self {
        Self {
            kind: SurfaceKind::Disk { half_width },
            nx: n,
            ny: n,
            phi,
        }
    }
}

/// Gudermannian `gd(r) = 2 atan(tanh(r/2))`: the strip height at distance `r`
/// from the core geodesic.
pub fn gudermannian(r: f64) -> f64 {
    2.0 * (0.5 * r).tanh().atan()
}

/// Largest admissible hyperbolic sup-norm of `φ`.
pub const NEHARI_BOUND: f64 = 1.5;

/// A hyperbolic surface `(X, h)` resolved on a chart grid, with the datum `φ`.
#[derive(Clone, Debug)]
pub struct ModelSurface {
    spec: SurfaceSpec,
    grid: ChartGrid,
    h: ConformalMetricField,
    phi: QuadDifferential,
    fuchsian_b: QuadDifferential,
    ops: DiffOps,
}

impl ModelSurface {
    pub fn new(spec: SurfaceSpec) -> Result<Self> {
        let (grid, h) = match spec.kind {
            SurfaceKind::Cylinder { ell, r } => {
                if !(ell > 0.0 && ell.is_finite()) || !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidSurface(format!(
                        "cylinder needs ell > 0 and r > 0, got ell = {ell}, r = {r}"
                    )));
                }
                let v = gudermannian(r);
                let hy = 2.0 * v / (spec.ny.max(2) - 1) as f64;
                let grid =
                    ChartGrid::periodic_x(Complex64::new(0.0, -v), ell, spec.nx, hy, spec.ny)?;
                let h = ConformalMetricField::from_closure(&grid, &StripMetric)?;
                (grid, h)
            }
            SurfaceKind::Disk { half_width } => {
                if !(half_width > 0.0) || 2.0 * half_width * half_width >= 1.0 {
                    return Err(Error::InvalidSurface(format!(
                        "disk chart half-width must lie in (0, 1/√2), got {half_width}"
                    )));
                }
                let grid = ChartGrid::with_spacings(
                    Complex64::new(-half_width, -half_width),
                    2.0 * half_width / (spec.nx.max(2) - 1) as f64,
                    2.0 * half_width / (spec.ny.max(2) - 1) as f64,
                    spec.nx,
                    spec.ny,
                )?;
                let h = ConformalMetricField::from_closure(&grid, &DiskMetric)?;
                (grid, h)
            }
        };
        let period = grid.period_x().unwrap_or(1.0);
        let phi = QuadDifferential::from_fn(&grid, |z| spec.phi.eval(z, period));
        let flat = FlatMetric::default().jet(Complex64::new(0.0, 0.0));
        let fuchsian_b = QuadDifferential::new(
            &grid,
            (0..grid.len())
                .map(|p| schwarzian_b_at(&flat, &h.jet2(p)))
                .collect(),
        )?;
        let surface = Self {
            ops: DiffOps::new(&grid),
            spec,
            grid,
            h,
            phi,
            fuchsian_b,
        };
        surface.validate()?;
        Ok(surface)
    }

    fn validate(&self) -> Result<()> {
        let dev = gauss_curvature(&self.h)
            .iter()
            .map(|k| (k + 1.0).abs())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidSurface(format!(
                "reference metric has curvature deviating from -1 by {dev:e}"
            )));
        }
        let h2 = self.grid.hx().max(self.grid.hy()).powi(2);
        let defect = self.phi.holomorphy_defect();
        if defect > h2 * (1.0 + self.phi.derivative_scale()) {
            return Err(Error::InvalidSurface(format!(
                "phi is not holomorphic: d/dzbar defect {defect:e}"
            )));
        }
        let norm = self.phi.hyperbolic_sup_norm(&self.h)?;
        if norm > NEHARI_BOUND {
            return Err(Error::InvalidSurface(format!(
                "phi has hyperbolic sup-norm {norm} above the admissible bound {NEHARI_BOUND}"
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }
    pub fn grid(&self) -> &ChartGrid {
        &self.grid
    }
    /// The hyperbolic metric `h`.
    pub fn h(&self) -> &ConformalMetricField {
        &self.h
    }
    pub fn phi(&self) -> &QuadDifferential {
        &self.phi
    }
    pub fn ops(&self) -> &DiffOps {
        &self.ops
    }

    /// `B(|dz|², h)` for the chart coordinate `z`.
    pub fn chart_schwarzian_of_h(&self) -> &QuadDifferential {
        &self.fuchsian_b
    }

    pub fn phi_at(&self, z: Complex64) -> Complex64 {
        self.spec.phi.eval(z, self.grid.period_x().unwrap_or(1.0))
    }

    /// Developing map of the projective structure whose Schwarzian relative
    /// to the uniformizing structure is `φ`.
    pub fn developing_map(&self) -> DevelopingMap {
        let (anchor, jet) = match self.spec.kind {
            // Normalized so that φ = 0 gives exactly z ↦ e^z.
            SurfaceKind::Cylinder { .. } => (Complex64::new(0.0, 0.0), [1.0, 1.0, 1.0]),
            SurfaceKind::Disk { .. } => (Complex64::new(0.0, 0.0), [0.0, 1.0, 0.0]),
        };
        DevelopingMap {
            surface: self.clone(),
            anchor,
            anchor_jet: jet.map(|v| Complex64::new(v, 0.0)),
        }
    }

    /// `S(dev) = 2B(|dz|², h) − φ` at a chart point.
    fn developing_schwarzian(&self, z: Complex64) -> Complex64 {
        let fuchsian = match self.spec.kind {
            SurfaceKind::Cylinder { .. } => Complex64::new(-0.5, 0.0),
            SurfaceKind::Disk { .. } => Complex64::new(0.0, 0.0),
        };
        fuchsian - self.phi_at(z)
    }

    /// Hyperbolic sup-norm of `φ`.
    pub fn phi_norm(&self) -> f64 {
        self.phi
            .hyperbolic_sup_norm(&self.h)
            .expect("phi sampled on the surface grid")
    }
}

/// Map `ζ(z)` with prescribed Schwarzian, obtained as a ratio `y₁/y₂` of
/// solutions of `y″ + (S/2) y = 0` integrated from an anchor point.
#[derive(Clone, Debug)]
pub struct DevelopingMap {
    surface: ModelSurface,
    anchor: Complex64,
    anchor_jet: [Complex64; 3],
}

const DEVELOPING_STEP: f64 = 5e-3;

impl HolomorphicMap for DevelopingMap {
    fn jet3(&self, z: Complex64) -> Jet3 {
        let [z0, z1, z2] = self.anchor_jet;
        // ζ = y₁/y₂ with y₂ = 1, y₂′ = −ζ″/(2ζ′) and Wronskian ζ′ at the anchor.
        let y2p = -z2 / (2.0 * z1);
        let mut y = [z0, z1 + z0 * y2p, Complex64::new(1.0, 0.0), y2p];
        let d = z - self.anchor;
        let steps = (d.norm() / DEVELOPING_STEP).ceil().max(1.0) as usize;
        let h = d / steps as f64;
        let rhs = |w: Complex64, y: [Complex64; 4]| {
            let s = 0.5 * self.surface.developing_schwarzian(w);
            [y[1], -s * y[0], y[3], -s * y[2]]
        };
        for n in 0..steps {
            let w = self.anchor + h * n as f64;
            let k1 = rhs(w, y);
            let k2 = rhs(w + 0.5 * h, std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]));
            let k3 = rhs(w + 0.5 * h, std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]));
            let k4 = rhs(w + h, std::array::from_fn(|i| y[i] + h * k3[i]));
            y = std::array::from_fn(|i| {
                y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            });
        }
        let [a, ap, b, bp] = y;
        let w = ap * b - a * bp;
        let f1 = w / (b * b);
        let f2 = -2.0 * w * bp / (b * b * b);
        let s = self.surface.developing_schwarzian(z);
        let f3 = s * f1 + 1.5 * f2 * f2 / f1;
        [a / b, f1, f2, f3]
    }
}
