//! The Epstein map of a conformal metric, its fundamental forms and curvatures.
//!
//! Points are computed in the chart the metric is given in, which is treated
//! as an affine chart of `ℂP¹`. Quantities that only depend on the metric and
//! its Schwarzian (the forms, `K(I)`, `H`) take `B` as an explicit input so that
//! callers may supply an intrinsic `B` on model surfaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{
    curvature_at, schwarzian_b_at, ConformalMetricField, HolomorphicMap, Jet1, Jet2, Jet3,
    LogDensity, QuadDifferential, SymTwoTensor, TensorValue,
};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::hyp3::{geodesic_flow, hyp_distance, IdealPoint, MobiusTransform, UpperHalfSpacePoint};

/// Base point hit by the frame of `|dz|²` at `z = 0`.
pub const BASE_POINT_HEIGHT: f64 = 2.0;

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `Ep(z) = (z, 0) + 2/(e^{2η} + 4|η_z|²) · (2 η_z̄, e^η)`.
pub fn epstein_point_jet(z: Complex64, jet: &Jet1) -> UpperHalfSpacePoint {
    let e = jet.eta.exp();
    let s = 2.0 / (e * e + 4.0 * jet.eta_z.norm_sqr());
    UpperHalfSpacePoint::from_parts(z + s * 2.0 * jet.eta_z.conj(), s * e)
}

pub fn epstein_point(sigma: &ConformalMetricField, index: usize) -> UpperHalfSpacePoint {
    epstein_point_jet(sigma.grid().point_at(index), &sigma.jet1(index))
}

/// Epstein point of a closed-form metric at an arbitrary chart point.
pub fn epstein_point_of<L: LogDensity + ?Sized>(density: &L, z: Complex64) -> UpperHalfSpacePoint {
    epstein_point_jet(z, &density.jet(z).jet1())
}

/// Frame `[[1, z], [0, 1]] · [[1, 0], [η_z, 1]] · diag(e^{−η/2}, e^{η/2})`; it
/// carries `(0, 2)` to `Ep(z)`.
pub fn epstein_frame_jet(z: Complex64, jet: &Jet1) -> MobiusTransform {
    let (lo, hi) = ((-0.5 * jet.eta).exp(), (0.5 * jet.eta).exp());
    // Product of the three factors written out; its determinant is 1.
    let a = cplx(lo) + z * jet.eta_z * lo;
    let b = z * hi;
    let c = jet.eta_z * lo;
    let d = cplx(hi);
    MobiusTransform::new(a, b, c, d).expect("frame has unit determinant")
}

pub fn epstein_frame(sigma: &ConformalMetricField, index: usize) -> MobiusTransform {
    epstein_frame_jet(sigma.grid().point_at(index), &sigma.jet1(index))
}

/// The point `(0, 2)` the frame field is anchored at.
pub fn base_point() -> UpperHalfSpacePoint {
    UpperHalfSpacePoint::from_parts(cplx(0.0), BASE_POINT_HEIGHT)
}

/// Flows `Ep(z)` for time `t` along the normal geodesic toward `z`.
pub fn flow_surface(sigma: &ConformalMetricField, t: f64, index: usize) -> UpperHalfSpacePoint {
    let z = sigma.grid().point_at(index);
    geodesic_flow(&epstein_point(sigma, index), &IdealPoint::Finite(z), t)
}

/// Coefficients of both fundamental forms and the curvature denominator at a
/// point, for log density `eta`, Schwarzian coefficient `b` and curvature `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormsAt {
    pub first: TensorValue,
    pub second: TensorValue,
    /// `(1 − K)² − 16|B|²/σ²`; the surface is immersed where this is nonzero.
    pub denominator: f64,
    /// `16|B|²/σ²`.
    pub b_norm: f64,
}

pub fn forms_at(eta: f64, b: Complex64, k: f64) -> FormsAt {
    let e2 = (2.0 * eta).exp();
    let b2 = b.norm_sqr();
    let bn = 16.0 * b2 / (e2 * e2);
    FormsAt {
        first: TensorValue {
            f: 4.0 * b2 / e2 + 0.25 * (1.0 - k) * (1.0 - k) * e2,
            q: 2.0 * (1.0 - k) * b,
        },
        second: TensorValue {
            f: 4.0 * b2 / e2 - 0.25 * (1.0 - k * k) * e2,
            q: -2.0 * k * b,
        },
        denominator: (1.0 - k) * (1.0 - k) - bn,
        b_norm: bn,
    }
}

impl FormsAt {
    fn is_degenerate(&self, k: f64) -> bool {
        !(self.denominator.abs() > 1e-12 * (1.0 - k) * (1.0 - k)) || !self.denominator.is_finite()
    }

    /// `K(I) = 4K / ((1 − K)² − 16|B|²/σ²)`.
    pub fn gauss_curvature(&self, k: f64) -> f64 {
        4.0 * k / self.denominator
    }

    /// `H = (K² − 1 − 16|B|²/σ²) / ((1 − K)² − 16|B|²/σ²)`.
    pub fn mean_curvature(&self, k: f64) -> f64 {
        (k * k - 1.0 - self.b_norm) / self.denominator
    }
}

fn check_inputs(sigma: &ConformalMetricField, b: &QuadDifferential, k: &[f64]) -> Result<()> {
    if b.grid() != sigma.grid() || k.len() != sigma.grid().len() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn forms_field(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
) -> Result<Vec<FormsAt>> {
    check_inputs(sigma, b, k)?;
    Ok((0..k.len())
        .map(|p| forms_at(sigma.eta()[p], b.values()[p], k[p]))
        .collect())
}

/// `I = 4|B|²/σ + ¼(1 − K)²σ + 2(1 − K)Re B`.
pub fn first_form(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
) -> Result<SymTwoTensor> {
    let forms = forms_field(sigma, b, k)?;
    SymTwoTensor::new(
        sigma.grid(),
        forms.iter().map(|f| f.first.f).collect(),
        forms.iter().map(|f| f.first.q).collect(),
    )
}

/// `II = 4|B|²/σ − ¼(1 − K²)σ − 2K Re B`, relative to the normal pointing
/// toward the ideal boundary.
pub fn second_form(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
) -> Result<SymTwoTensor> {
    let forms = forms_field(sigma, b, k)?;
    SymTwoTensor::new(
        sigma.grid(),
        forms.iter().map(|f| f.second.f).collect(),
        forms.iter().map(|f| f.second.q).collect(),
    )
}

fn curvature_field(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
    eval: impl Fn(&FormsAt, f64) -> f64,
) -> Result<Vec<f64>> {
    let forms = forms_field(sigma, b, k)?;
    forms
        .iter()
        .enumerate()
        .map(|(p, f)| {
            if f.is_degenerate(k[p]) {
                Err(Error::DegenerateSurface {
                    index: p,
                    z: sigma.grid().point_at(p),
                })
            } else {
                Ok(eval(f, k[p]))
            }
        })
        .collect()
}

/// Gaussian curvature of the Epstein surface.
pub fn surface_gauss_curvature(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
) -> Result<Vec<f64>> {
    curvature_field(sigma, b, k, FormsAt::gauss_curvature)
}

/// Mean curvature of the Epstein surface.
pub fn surface_mean_curvature(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    k: &[f64],
) -> Result<Vec<f64>> {
    curvature_field(sigma, b, k, FormsAt::mean_curvature)
}

/// `B(|dz|², σ)`, the Schwarzian relative to the chart's flat metric.
pub fn chart_schwarzian(sigma: &ConformalMetricField) -> QuadDifferential {
    let flat = Jet2 {
        eta: 0.0,
        eta_z: cplx(0.0),
        eta_zz: cplx(0.0),
        eta_zzbar: 0.0,
    };
    let q = (0..sigma.grid().len())
        .map(|p| schwarzian_b_at(&flat, &sigma.jet2(p)))
        .collect();
    QuadDifferential::new(sigma.grid(), q).expect("field sampled on its own grid")
}

/// First fundamental form at `z` from second-order centered differences of
/// the Epstein point, measured in the ambient metric `(|dz|² + dt²)/t²`.
pub fn pullback_first_form<L: LogDensity + ?Sized>(
    density: &L,
    z: Complex64,
    h: f64,
) -> TensorValue {
    let p0 = epstein_point_of(density, z);
    let diff = |dir: Complex64| {
        let a = epstein_point_of(density, z + dir * h);
        let b = epstein_point_of(density, z - dir * h);
        ((a.z() - b.z()) / (2.0 * h), (a.t() - b.t()) / (2.0 * h))
    };
    let (xz, xt) = diff(cplx(1.0));
    let (yz, yt) = diff(Complex64::new(0.0, 1.0));
    let w = 1.0 / (p0.t() * p0.t());
    let gxx = (xz.norm_sqr() + xt * xt) * w;
    let gyy = (yz.norm_sqr() + yt * yt) * w;
    let gxy = ((xz * yz.conj()).re + xt * yt) * w;
    TensorValue {
        f: 0.5 * (gxx + gyy),
        q: Complex64::new(0.5 * (gxx - gyy), -gxy),
    }
}

/// Closed-form distance between the time-`t` flow of the surface of
/// `σ(ε) = e^{2λ(ε)}|dz|²/f(ε)` and the surface of `σ(cε)`, `c = e^{−2t}`,
/// from the 1-jets of `λ` at `ε` and `cε`.
pub fn parallel_distance_jets(
    lam_eps: &Jet1,
    lam_ceps: &Jet1,
    f_eps: f64,
    f_ceps: f64,
    t: f64,
) -> Result<f64> {
    for (name, v) in [("f(eps)", f_eps), ("f(c eps)", f_ceps)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain {
                name,
                value: v,
                expected: "(0, ∞)",
            });
        }
    }
    let c = (-2.0 * t).exp();
    let r = (c * f_eps / f_ceps).sqrt() * (lam_ceps.eta - lam_eps.eta).exp();
    let q =
        4.0 * c * f_eps * (-2.0 * lam_eps.eta).exp() * (lam_ceps.eta_z - lam_eps.eta_z).norm_sqr();
    let arg = (((1.0 - r) * (1.0 - r) + q) / ((1.0 + r) * (1.0 + r) + q)).sqrt();
    if !(arg < 1.0) {
        return Err(Error::Domain {
            name: "arctanh argument",
            value: arg,
            expected: "[0, 1)",
        });
    }
    Ok(2.0 * arg.atanh())
}

/// [`parallel_distance_jets`] for a family given by closures `λ(ε, z)` and `f(ε)`.
pub fn parallel_distance(
    lambda: impl Fn(f64, Complex64) -> Jet1,
    f: impl Fn(f64) -> f64,
    eps: f64,
    t: f64,
    z: Complex64,
) -> Result<f64> {
    let ce = (-2.0 * t).exp() * eps;
    parallel_distance_jets(&lambda(eps, z), &lambda(ce, z), f(eps), f(ce), t)
}

/// The same distance measured directly in upper half-space.
pub fn parallel_distance_direct(
    lam_eps: &Jet1,
    lam_ceps: &Jet1,
    f_eps: f64,
    f_ceps: f64,
    t: f64,
    z: Complex64,
) -> f64 {
    let sigma_eps = Jet1 {
        eta: lam_eps.eta - 0.5 * f_eps.ln(),
        eta_z: lam_eps.eta_z,
    };
    let sigma_ceps = Jet1 {
        eta: lam_ceps.eta - 0.5 * f_ceps.ln(),
        eta_z: lam_ceps.eta_z,
    };
    let flowed = geodesic_flow(&epstein_point_jet(z, &sigma_eps), &IdealPoint::Finite(z), t);
    hyp_distance(&flowed, &epstein_point_jet(z, &sigma_ceps))
}

/// One vertex of a sampled Epstein surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsteinSample {
    /// Source chart point.
    pub z: Complex64,
    pub base: UpperHalfSpacePoint,
    /// Endpoint of the normal geodesic; the developed image of `z`.
    pub normal_endpoint: IdealPoint,
    #[serde(rename = "I")]
    pub first: TensorValue,
    #[serde(rename = "II")]
    pub second: TensorValue,
    /// `K(I)`, absent where the surface is not immersed.
    pub gauss_curvature: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub degenerate: bool,
}

/// Triangulated Epstein surface following the grid connectivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsteinMesh {
    pub vertices: Vec<EpsteinSample>,
    pub triangles: Vec<[usize; 3]>,
    /// Grid node of each vertex; seam vertices repeat column 0.
    pub node: Vec<usize>,
}

impl EpsteinMesh {
    pub fn degenerate_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.degenerate).count()
    }
}

/// Mesh of the Epstein surface, with `B` taken relative to the chart.
pub fn sample_mesh(sigma: &ConformalMetricField) -> EpsteinMesh {
    let b = chart_schwarzian(sigma);
    sample_mesh_with(
        sigma,
        &b,
        None::<&crate::conformal::Affine>,
        Exec::default(),
    )
    .expect("Schwarzian sampled on the metric's grid")
}

/// Mesh of the Epstein surface of `σ` with Schwarzian `b`.
///
/// Points are placed in the chart `ζ = dev(z)` when a developing map is given,
/// otherwise in the source chart. The local data `I`, `II`, `K(I)`, `H` are
/// chart-independent and reported in the source chart. On a periodic grid the
/// seam is closed with one extra column of vertices at `x + period`.
pub fn sample_mesh_with<D: HolomorphicMap + ?Sized>(
    sigma: &ConformalMetricField,
    b: &QuadDifferential,
    dev: Option<&D>,
    exec: Exec,
) -> Result<EpsteinMesh> {
    let grid = sigma.grid();
    if b.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let cols = if grid.is_periodic_x() { nx + 1 } else { nx };
    let node: Vec<usize> = (0..ny)
        .flat_map(|j| (0..cols).map(move |i| grid.index(i % nx, j)))
        .collect();
    let period = grid.period_x().unwrap_or(0.0);
    let vertices = map_range(exec, node.len(), |v| {
        let p = node[v];
        let seam = v % cols == nx;
        let jet = sigma.jet2(p);
        let k = curvature_at(&jet);
        let forms = forms_at(jet.eta, b.values()[p], k);
        let z = grid.point_at(p) + if seam { cplx(period) } else { cplx(0.0) };
        let (w, jet1) = match dev {
            Some(d) => develop_jet(&jet.jet1(), &d.jet3(z)),
            None => (z, jet.jet1()),
        };
        let degenerate = forms.is_degenerate(k) || forms.first.det() <= 0.0;
        EpsteinSample {
            z,
            base: epstein_point_jet(w, &jet1),
            normal_endpoint: IdealPoint::Finite(w),
            first: forms.first,
            second: forms.second,
            gauss_curvature: (!degenerate).then(|| forms.gauss_curvature(k)),
            mean_curvature: (!degenerate).then(|| forms.mean_curvature(k)),
            degenerate,
        }
    });
    let mut triangles = Vec::with_capacity(2 * cols * ny);
    for j in 0..ny - 1 {
        for i in 0..cols - 1 {
            let v00 = j * cols + i;
            let v10 = v00 + 1;
            let v01 = v00 + cols;
            let v11 = v01 + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Ok(EpsteinMesh {
        vertices,
        triangles,
        node,
    })
}

/// Pushes a 1-jet of `η` forward along a chart map `ζ = g(z)`:
/// `η̃(ζ) = η(z) − ln|g′|`, `η̃_ζ = (η_z − g″/(2g′))/g′`.
pub fn develop_jet(jet: &Jet1, g: &Jet3) -> (Complex64, Jet1) {
    let [w, g1, g2, _] = *g;
    (
        w,
        Jet1 {
            eta: jet.eta - g1.norm().ln(),
            eta_z: (jet.eta_z - 0.5 * g2 / g1) / g1,
        },
    )
}
