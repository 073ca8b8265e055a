use epstein_core::asymptotics::{
    phi_coefficient, rescaled_forms, verify_asymptotics, SCALING_DERIVATIVE,
};
use epstein_core::conformal::SymTwoTensor;
use epstein_core::foliation::{
    continuation, Mode, ModelSurface, PhiSpec, SolverConfig, SurfaceSpec,
};
use num_complex::Complex64;
use std::f64::consts::PI;

const LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

fn surface() -> ModelSurface {
    let phi = PhiSpec::Fourier {
        amplitude: Complex64::new(0.05, 0.0),
        mode: 0,
    };
    ModelSurface::new(SurfaceSpec::cylinder(2.0 * PI, 3.0, 64, 32, phi)).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn rescaled_forms_converge_linearly_and_expand_as_predicted() {
    let s = surface();
    let ks: Vec<f64> = LADDER.iter().map(|e| -e).collect();
    for mode in [Mode::KSurface, Mode::Cmc] {
        let branch = continuation(mode, &ks, &s, &SolverConfig::default()).unwrap();
        let report = verify_asymptotics(&branch, &s).unwrap();
        let eps = &report.eps_list;
        let si = slope(eps, &report.deviation_i);
        let sii = slope(eps, &report.deviation_ii);
        assert!(
            (si - 1.0).abs() < 0.2 && (sii - 1.0).abs() < 0.2,
            "{mode:?}: {si} {sii}"
        );
        assert!((report.ci_re + 1.0).abs() < 0.1 && report.ci_im.abs() < 0.1);
        assert!(report.cii_re.abs() < 0.1 && report.cii_im.abs() < 0.1);

        // (I_ε − II_ε)/ε → 2f′(0)(h + 2 Re φ): the normalized defect shrinks with ε.
        let h = SymTwoTensor::from_metric(s.h());
        let target = h
            .checked_add(&SymTwoTensor::real_part(s.phi()).scale(2.0))
            .unwrap()
            .scale(2.0 * SCALING_DERIVATIVE);
        let forms = rescaled_forms(&branch, &s).unwrap();
        let defects: Vec<f64> = forms
            .iter()
            .map(|r| {
                let d = r.first.checked_sub(&r.second).unwrap().scale(1.0 / r.eps);
                d.checked_sub(&target).unwrap().sup_norm(s.h()).unwrap()
            })
            .collect();
        // Samples are stored by k, so order by ε before comparing.
        let mut by_eps: Vec<(f64, f64)> = forms.iter().map(|r| r.eps).zip(defects).collect();
        by_eps.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(
            by_eps.windows(2).all(|w| w[0].1 < w[1].1),
            "{mode:?}: {by_eps:?}"
        );
        assert!(by_eps[0].1 < 0.01, "{mode:?}: {by_eps:?}");

        // The φ-component of the trace-free difference vanishes in the limit.
        let smallest = forms.iter().min_by(|a, b| a.eps.total_cmp(&b.eps)).unwrap();
        let pc = phi_coefficient(
            &smallest
                .second
                .checked_sub(&h)
                .unwrap()
                .scale(1.0 / smallest.eps),
            &s,
        )
        .unwrap();
        assert!(pc.c_re.abs() < 0.1 && pc.c_im.abs() < 0.1, "{pc:?}");
    }
}
