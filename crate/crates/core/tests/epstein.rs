use epstein_core::conformal::{
    gauss_curvature, tensor_algebra, ChartGrid, ConformalMetricField, DiskMetric, FlatMetric,
    HolomorphicMap, Jet2, LogDensity, PlaneWave, Pullback, Waves,
};
use epstein_core::epstein::{
    chart_schwarzian, epstein_frame, epstein_point, epstein_point_of, first_form, flow_surface,
    second_form, surface_gauss_curvature, surface_mean_curvature,
};
use epstein_core::foliation::{c_of_k, f_cmc};
use epstein_core::hyp3::{hyp_distance, MobiusTransform};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn waves(max_amp: f64) -> impl Strategy<Value = Vec<PlaneWave>> {
    prop::collection::vec(
        (
            -max_amp..max_amp,
            -3.0f64..3.0,
            -3.0f64..3.0,
            0.0f64..std::f64::consts::TAU,
        )
            .prop_map(|(amplitude, p, q, phase)| PlaneWave {
                amplitude,
                p,
                q,
                phase,
            }),
        1..4,
    )
}

fn disk_grid() -> ChartGrid {
    ChartGrid::square(-0.4, 0.4, -0.4, 11).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn epstein_map_is_mobius_natural(
        w in waves(0.3), z in (-1.0f64..1.0, -1.0f64..1.0),
        a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0),
        cc in (-2.0f64..2.0, -2.0f64..2.0), d in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let (a, b, cc, d) = (c(a.0, a.1), c(b.0, b.1), c(cc.0, cc.1), c(d.0, d.1));
        prop_assume!((a * d - b * cc).norm() > 0.3);
        let m = MobiusTransform::new(a, b, cc, d).unwrap();
        let [_, _, mc, md] = m.entries();
        let z = c(z.0, z.1);
        prop_assume!((mc * z + md).norm() > 0.3);
        let sigma = Waves { base: FlatMetric { eta: 0.2 }, waves: w };
        // m_*σ is the pullback of σ by m⁻¹.
        let pushed = Pullback { metric: sigma.clone(), map: m.inverse() };
        let lhs = epstein_point_of(&pushed, m.jet3(z)[0]);
        let rhs = m.apply(&epstein_point_of(&sigma, z));
        prop_assert!(hyp_distance(&lhs, &rhs) < 1e-9, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn flow_matches_rescaled_metric(w in waves(0.05), t in -1.0f64..1.0) {
        let g = disk_grid();
        let sigma = ConformalMetricField::from_closure(&g, &Waves { base: DiskMetric, waves: w }).unwrap();
        let scaled = sigma.scaled((2.0 * t).exp()).unwrap();
        for p in g.interior() {
            let d = hyp_distance(&flow_surface(&sigma, t, p), &epstein_point(&scaled, p));
            prop_assert!(d < 1e-9);
        }
    }

    #[test]
    fn curvatures_match_shape_operator(w in waves(0.05)) {
        let g = disk_grid();
        let sigma = ConformalMetricField::from_closure(&g, &Waves { base: DiskMetric, waves: w }).unwrap();
        let b = chart_schwarzian(&sigma);
        let k = gauss_curvature(&sigma);
        let first = first_form(&sigma, &b, &k).unwrap();
        let second = second_form(&sigma, &b, &k).unwrap();
        let alg = tensor_algebra(&first, &second, &sigma).unwrap();
        let kg = surface_gauss_curvature(&sigma, &b, &k).unwrap();
        let hm = surface_mean_curvature(&sigma, &b, &k).unwrap();
        for p in 0..g.len() {
            prop_assert!((kg[p] - (alg.shape_det[p] - 1.0)).abs() < 1e-9);
            prop_assert!((hm[p] - 0.5 * alg.shape_trace[p]).abs() < 1e-9);
        }
    }

    #[test]
    fn small_epsilon_members_have_negative_definite_second_form(w in waves(0.02), eps in 0.01f64..0.1) {
        let g = disk_grid();
        let sigma = ConformalMetricField::from_closure(&g, &Waves { base: DiskMetric, waves: w })
            .unwrap()
            .scaled(c_of_k(-eps).unwrap())
            .unwrap();
        let b = chart_schwarzian(&sigma);
        let ii = second_form(&sigma, &b, &gauss_curvature(&sigma)).unwrap();
        prop_assert!(ii.is_negative_definite());
    }
}

#[test]
fn epstein_point_depends_on_the_one_jet_only() {
    let z0 = c(0.1, -0.2);
    let base = Waves {
        base: DiskMetric,
        waves: vec![PlaneWave {
            amplitude: 0.1,
            p: 1.0,
            q: 2.0,
            phase: 0.4,
        }],
    };
    // Adds Re(a(z−z0)²) + b|z−z0|², which vanishes to first order at z0.
    let bent = |z: Complex64| {
        let (a, b) = (c(0.7, -0.3), 0.4);
        let w = z - z0;
        let mut j: Jet2 = base.jet(z);
        j.eta += (a * w * w).re + b * w.norm_sqr();
        j.eta_z += a * w + b * w.conj();
        j.eta_zz += a;
        j.eta_zzbar += b;
        j
    };
    let g = ChartGrid::with_spacings(z0 - c(0.2, 0.2), 0.05, 0.05, 9, 9).unwrap();
    let p0 = g.index(4, 4);
    assert!((g.point_at(p0) - z0).norm() < 1e-15);
    let s1 = ConformalMetricField::from_closure(&g, &base).unwrap();
    let s2 = ConformalMetricField::from_closure(&g, &bent).unwrap();
    assert_eq!(epstein_point(&s1, p0), epstein_point(&s2, p0));
    assert_eq!(epstein_frame(&s1, p0), epstein_frame(&s2, p0));
    // The second-order data do differ, so the forms must too.
    let ii = |s: &ConformalMetricField| {
        second_form(s, &chart_schwarzian(s), &gauss_curvature(s))
            .unwrap()
            .at(p0)
    };
    assert!((ii(&s1).f - ii(&s2).f).abs() > 1e-3);
}

#[test]
fn fuchsian_forms_and_curvatures() {
    let g = disk_grid();
    let h = ConformalMetricField::from_closure(&g, &DiskMetric).unwrap();
    for k in [-0.9, -0.75, -0.3, -0.05] {
        let cc = c_of_k(k).unwrap();
        let sigma = h.scaled(cc).unwrap();
        let b = chart_schwarzian(&sigma);
        let kk = gauss_curvature(&sigma);
        let first = first_form(&sigma, &b, &kk).unwrap();
        let second = second_form(&sigma, &b, &kk).unwrap();
        let kg = surface_gauss_curvature(&sigma, &b, &kk).unwrap();
        let hm = surface_mean_curvature(&sigma, &b, &kk).unwrap();
        for p in 0..g.len() {
            let hp = h.density(p);
            assert!((first.f()[p] - 0.25 * cc * (1.0 + 1.0 / cc).powi(2) * hp).abs() < 1e-12 * hp);
            assert!((second.f()[p] + 0.25 * cc * (1.0 - 1.0 / (cc * cc)) * hp).abs() < 1e-12 * hp);
            assert!(first.q()[p].norm() < 1e-12 && second.q()[p].norm() < 1e-12);
            assert!((kg[p] - k).abs() < 1e-12);
            assert!((hm[p] + (1.0 + k).sqrt()).abs() < 1e-12);
        }
    }
    assert!((c_of_k(-0.75).unwrap() - 3.0).abs() < 1e-15);
}

#[test]
fn asymptotically_poincare_family_tends_to_the_boundary() {
    // σ(ε) = h / f̃(ε²) with f̃(ε) = f_cmc(−ε); height/ε → e^{−ρ} = 2√f̃′(0)·e^{−ρ}.
    let rho = Waves {
        base: DiskMetric,
        waves: vec![PlaneWave {
            amplitude: 0.1,
            p: 2.0,
            q: 1.0,
            phase: 0.0,
        }],
    };
    let z = c(0.2, 0.1);
    let jr = rho.jet(z);
    let mut prev = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let family = epstein_core::conformal::Scaled {
            inner: rho.clone(),
            factor: 1.0 / f_cmc(-eps * eps).unwrap(),
        };
        let p = epstein_point_of(&family, z);
        let err = (p.t() / eps - (-jr.eta).exp()).abs();
        assert!((p.z() - z).norm() < 2.0 * eps * eps);
        assert!(err < prev && err < 10.0 * eps * eps, "eps {eps}: {err:e}");
        prev = err;
    }
}
