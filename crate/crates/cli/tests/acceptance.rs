//! End-to-end acceptance criteria. Runs without the libtest harness so that the
//! PASS/FAIL line of every criterion is printed on each `cargo test`.
//!
//! Exit status is nonzero when any criterion misses its expected outcome.
//! Criterion 7 has an expected literal failure: its stated constant is off
//! by a factor of two, and the run instead requires that defect to reproduce
//! exactly.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use epstein_cli::ExperimentConfig;
use epstein_core::asymptotics::verify_asymptotics;
use epstein_core::conformal::{
    compose, gauss_curvature, tensor_algebra, Affine, ChartGrid, ConformalMetricField, DiskMetric,
    Koebe, PlaneWave, Pullback, Waves,
};
use epstein_core::epstein::{
    chart_schwarzian, epstein_point, first_form, flow_surface, parallel_distance_direct,
    parallel_distance_jets, pullback_first_form, second_form, surface_gauss_curvature,
    surface_mean_curvature,
};
use epstein_core::foliation::{
    continuation, f_cmc, intrinsic_B, linearize_curvature, newton_solve, residual_F, residual_G,
    unscale, Mode, ModelSurface, PhiSpec, SolverConfig, SurfaceSpec,
};
use epstein_core::hyp3::hyp_distance;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;
const LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

type Outcome = Result<Verdict, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// How a criterion turned out, and whether that is the expected result.
struct Verdict {
    passed: bool,
    detail: String,
    /// Set for the one criterion whose literal statement is known not to hold.
    expected_failure: Option<Result<String, String>>,
}

impl Verdict {
    fn new(passed: bool, detail: String) -> Self {
        Self {
            passed,
            detail,
            expected_failure: None,
        }
    }
}

fn sup(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn cylinder(amplitude: f64, nx: usize, ny: usize) -> ModelSurface {
    let phi = if amplitude == 0.0 {
        PhiSpec::Zero
    } else {
        PhiSpec::Fourier {
            amplitude: Complex64::new(amplitude, 0.0),
            mode: 0,
        }
    };
    ModelSurface::new(SurfaceSpec::cylinder(2.0 * PI, 3.0, nx, ny, phi)).expect("valid cylinder")
}

fn random_waves(rng: &mut ChaCha8Rng, amp: f64) -> Vec<PlaneWave> {
    (0..rng.random_range(1..=3))
        .map(|_| PlaneWave {
            amplitude: rng.random_range(-amp..amp),
            p: rng.random_range(-3.0..3.0),
            q: rng.random_range(-3.0..3.0),
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .collect()
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn fuchsian_exactness() -> Outcome {
    let s = cylinder(0.0, 128, 64);
    let config = SolverConfig::default();
    let zero = vec![0.0; s.grid().len()];
    let (mut u_max, mut k_err, mut h_err, mut slowest) = (0.0f64, 0.0f64, 0.0f64, Duration::ZERO);
    for mode in [Mode::KSurface, Mode::Cmc] {
        for k in [-0.5, -0.1, -0.01] {
            let start = Instant::now();
            let r = newton_solve(mode, k, &s, &zero, &config).map_err(|e| e.to_string())?;
            let tau = s.h().perturbed(&r.u).map_err(|e| e.to_string())?;
            let sigma = unscale(mode, k, &tau).map_err(|e| e.to_string())?;
            let b = intrinsic_B(&sigma, &s).map_err(|e| e.to_string())?;
            let kk = gauss_curvature(&sigma);
            let kg = surface_gauss_curvature(&sigma, &b, &kk).map_err(|e| e.to_string())?;
            let hm = surface_mean_curvature(&sigma, &b, &kk).map_err(|e| e.to_string())?;
            slowest = slowest.max(start.elapsed());
            u_max = u_max.max(sup(r.u.iter().map(|v| v.abs())));
            k_err = k_err.max(sup(kg.iter().map(|v| (v - k).abs())));
            h_err = h_err.max(sup(hm.iter().map(|v| (v + (1.0 + k).sqrt()).abs())));
        }
    }
    let passed = u_max < 1e-12 && k_err < 1e-9 && h_err < 1e-9 && slowest < Duration::from_secs(10);
    Ok(Verdict::new(
        passed,
        format!(
            "|u| {u_max:.1e} < 1e-12, |K(I)-k| {k_err:.1e} < 1e-9, |H+sqrt(1+k)| {h_err:.1e} < 1e-9, \
             slowest k {:.2} s < 10 s",
            slowest.as_secs_f64()
        ),
    ))
}

fn flow_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let grid = ChartGrid::square(-0.5, 0.5, -0.5, 21).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = Waves {
            base: DiskMetric,
            waves: random_waves(&mut rng, 0.1),
        };
        let t: f64 = rng.random_range(-1.0..=1.0);
        let sigma = ConformalMetricField::from_closure(&grid, &d).map_err(|e| e.to_string())?;
        let scaled = sigma.scaled((2.0 * t).exp()).map_err(|e| e.to_string())?;
        for p in grid.interior() {
            worst = worst.max(hyp_distance(
                &flow_surface(&sigma, t, p),
                &epstein_point(&scaled, p),
            ));
        }
    }
    Ok(Verdict::new(
        worst < 1e-9,
        format!("50 metrics, max distance {worst:.1e} < 1e-9"),
    ))
}

fn curvature_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let grid = ChartGrid::square(-0.4, 0.4, -0.4, 17).map_err(|e| e.to_string())?;
    let mut kerr = 0.0f64;
    for _ in 0..20 {
        let d = Waves {
            base: DiskMetric,
            waves: random_waves(&mut rng, 0.1),
        };
        let sigma = ConformalMetricField::from_closure(&grid, &d).map_err(|e| e.to_string())?;
        let b = chart_schwarzian(&sigma);
        let k = gauss_curvature(&sigma);
        let first = first_form(&sigma, &b, &k).map_err(|e| e.to_string())?;
        let second = second_form(&sigma, &b, &k).map_err(|e| e.to_string())?;
        let alg = tensor_algebra(&first, &second, &sigma).map_err(|e| e.to_string())?;
        let kg = surface_gauss_curvature(&sigma, &b, &k).map_err(|e| e.to_string())?;
        kerr = kerr.max(sup(
            (0..grid.len()).map(|p| (kg[p] - (alg.shape_det[p] - 1.0)).abs())
        ));
    }

    let pulled = Pullback {
        metric: DiskMetric,
        map: compose(
            Koebe,
            Affine {
                a: Complex64::new(0.4, 0.1),
                b: Complex64::new(0.05, 0.0),
            },
        ),
    };
    let g = ChartGrid::square(-0.3, 0.3, -0.3, 9).map_err(|e| e.to_string())?;
    let sigma = ConformalMetricField::from_closure(&g, &pulled).map_err(|e| e.to_string())?;
    let first = first_form(&sigma, &chart_schwarzian(&sigma), &gauss_curvature(&sigma))
        .map_err(|e| e.to_string())?;
    let err = |step: f64| {
        sup((0..g.len()).map(|p| {
            let fd = pullback_first_form(&pulled, g.point_at(p), step);
            let ex = first.at(p);
            ((fd.f - ex.f).powi(2) + (fd.q - ex.q).norm_sqr()).sqrt()
        }))
    };
    let errs = [err(0.02), err(0.01), err(0.005)];
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let passed = kerr < 1e-9 && ratios.iter().all(|r| (r - 4.0).abs() <= 0.5);
    Ok(Verdict::new(
        passed,
        format!(
            "|K - (det(I^-1 II) - 1)| {kerr:.1e} < 1e-9, pullback error ratios {:.4} {:.4} in 4 +- 0.5",
            ratios[0], ratios[1]
        ),
    ))
}

fn tangent_coefficients(mode: Mode) -> Outcome {
    let start = Instant::now();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/cylinder.json");
    let config = ExperimentConfig::load(std::path::Path::new(path)).map_err(|e| e.to_string())?;
    let surface = config.model_surface().map_err(|e| e.to_string())?;
    let branch = continuation(mode, &config.k_values(), &surface, &config.solver.to_core())
        .map_err(|e| e.to_string())?;
    let r = verify_asymptotics(&branch, &surface).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let passed = (-1.1..=-0.9).contains(&r.ci_re)
        && r.ci_im.abs() < 0.1
        && r.cii_re.abs() < 0.1
        && r.cii_im.abs() < 0.1
        && elapsed < Duration::from_secs(300);
    Ok(Verdict::new(
        passed,
        format!(
            "cI {:+.6} {:+.1e}i, cII {:+.1e} {:+.1e}i, {:.1} s < 300 s",
            r.ci_re,
            r.ci_im,
            r.cii_re,
            r.cii_im,
            elapsed.as_secs_f64()
        ),
    ))
}

fn parallel_distance() -> Outcome {
    let s = cylinder(0.05, 128, 64);
    let t = 0.3f64;
    let c = (-2.0 * t).exp();
    // Members at ε and at c·ε for each rung of the ladder.
    let mut ks: Vec<f64> = LADDER.iter().flat_map(|e| [-e, -c * e]).collect();
    ks.sort_by(|a, b| a.total_cmp(b));
    let branch = continuation(Mode::KSurface, &ks, &s, &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    let find = |k: f64| {
        branch
            .samples
            .iter()
            .position(|x| x.k == k)
            .expect("requested k is on the branch")
    };
    let f = |e: f64| f_cmc(-e).map_err(|e| e.to_string());
    let (mut gap, mut dmax) = (0.0f64, Vec::new());
    for &e in &LADDER {
        let te = branch.tau(find(-e), &s).map_err(|e| e.to_string())?;
        let tc = branch.tau(find(-c * e), &s).map_err(|e| e.to_string())?;
        let (fe, fc) = (f(e)?, f(c * e)?);
        let mut d_e = 0.0f64;
        for p in 0..s.grid().len() {
            let (le, lc) = (te.jet1(p), tc.jet1(p));
            let closed = parallel_distance_jets(&le, &lc, fe, fc, t).map_err(|e| e.to_string())?;
            let direct = parallel_distance_direct(&le, &lc, fe, fc, t, s.grid().point_at(p));
            gap = gap.max((closed - direct).abs());
            d_e = d_e.max(closed);
        }
        dmax.push(d_e);
    }
    let slope = log_log_slope(&LADDER, &dmax);
    let decreasing = dmax.windows(2).all(|w| w[1] < w[0]);
    let passed = gap < 1e-9 && decreasing && (0.8..=1.2).contains(&slope);
    Ok(Verdict::new(
        passed,
        format!(
            "closed form vs direct {gap:.1e} < 1e-9, sup distance {:.2e} -> {:.2e}, slope {slope:.4} in [0.8, 1.2]",
            dmax[0], dmax[3]
        ),
    ))
}

fn derivative_structure() -> Outcome {
    let s = cylinder(0.05, 128, 64);
    let step = 1e-4;
    let dq = |g: &dyn Fn(f64) -> epstein_core::Result<Vec<f64>>| -> Result<Vec<f64>, String> {
        let (p, m) = (
            g(step).map_err(|e| e.to_string())?,
            g(-step).map_err(|e| e.to_string())?,
        );
        Ok(p.iter()
            .zip(&m)
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let df = dq(&|k| residual_F(k, s.h(), &s))?;
    let dg = dq(&|k| residual_G(k, s.h(), &s))?;
    let f_sup = sup(df.iter().map(|v| v.abs()));
    // |φ|²/h² per node, with h the hyperbolic density.
    let phi2: Vec<f64> = (0..s.grid().len())
        .map(|p| s.phi().values()[p].norm_sqr() / s.h().density(p).powi(2))
        .collect();
    let rel = |c: f64| {
        sup(dg
            .iter()
            .zip(&phi2)
            .map(|(d, q)| (d - c * q).abs() / (c.abs() * q)))
    };
    let (literal, derived) = (rel(-4.0), rel(-2.0));
    let passed = f_sup < 1e-6 && literal < 1e-3;
    let diagnosis = if f_sup < 1e-6 && (literal - 0.5).abs() < 1e-2 && derived < 1e-3 {
        Ok(format!(
            "stated constant -4 is off by a factor of two: relative error {literal:.3} against -4, \
             {derived:.1e} against -2"
        ))
    } else {
        Err(format!(
            "defect did not reproduce: literal {literal:.3e}, derived {derived:.3e}"
        ))
    };
    Ok(Verdict {
        passed,
        detail: format!(
            "sup dF/dk {f_sup:.1e} < 1e-6, dG/dk vs -4|phi|^2/h^2 relative error {literal:.3e} < 1e-3"
        ),
        expected_failure: Some(diagnosis),
    })
}

fn linearization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let s = cylinder(0.05, 64, 32);
    let g = s.grid();
    let mut lin_err = 0.0f64;
    for _ in 0..20 {
        // Integer x-frequencies keep directions periodic on the cylinder.
        let waves: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.random_range(-0.5..0.5),
                    rng.random_range(0..4) as f64,
                    rng.random_range(-2.0..2.0),
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let field = |scale: f64| -> Vec<f64> {
            (0..g.len())
                .map(|p| {
                    let z = g.point_at(p);
                    scale
                        * waves
                            .iter()
                            .map(|(a, m, q, ph)| a * (m * z.re + q * z.im + ph).cos())
                            .sum::<f64>()
                })
                .collect()
        };
        let u = field(1.0);
        let tau = s.h().perturbed(&field(0.2)).map_err(|e| e.to_string())?;
        let lin = linearize_curvature(&tau, &u).map_err(|e| e.to_string())?;
        let step = 1e-5;
        let shifted = |sgn: f64| -> Result<Vec<f64>, String> {
            let w: Vec<f64> = u.iter().map(|v| sgn * step * v).collect();
            Ok(gauss_curvature(
                &tau.perturbed(&w).map_err(|e| e.to_string())?,
            ))
        };
        let (kp, km) = (shifted(1.0)?, shifted(-1.0)?);
        lin_err = lin_err.max(sup(
            (0..g.len()).map(|p| ((kp[p] - km[p]) / (2.0 * step) - lin[p]).abs())
        ));
    }

    // A strong perturbation solved from zero takes several Newton steps.
    let strong = cylinder(0.3, 64, 32);
    let zero = vec![0.0; strong.grid().len()];
    let (mut worst_ratio, mut pairs) = (0.0f64, 0usize);
    for mode in [Mode::KSurface, Mode::Cmc] {
        let r = newton_solve(mode, -0.5, &strong, &zero, &SolverConfig::default())
            .map_err(|e| e.to_string())?;
        for w in r.residual_history.windows(2) {
            if w[0] < 1e-4 {
                worst_ratio = worst_ratio.max(w[1] / w[0]);
                pairs += 1;
            }
        }
    }
    let passed = lin_err < 1e-6 && pairs > 0 && worst_ratio <= 0.1;
    Ok(Verdict::new(
        passed,
        format!(
            "linearization vs centered differences {lin_err:.1e} < 1e-6 on 20 directions, \
             residual ratio {worst_ratio:.1e} <= 0.1 over {pairs} steps below 1e-4"
        ),
    ))
}

fn invariant_suites() -> Outcome {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_epstein"))
        .args(["--quiet", "verify", "--suite", "all", "--out"])
        .arg(out.path())
        .status()
        .map_err(|e| e.to_string())?;
    Ok(Verdict::new(
        status.code() == Some(0),
        format!("`epstein verify --suite all` exited with {status}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fuchsian exactness", fuchsian_exactness),
        ("flow lemma", flow_lemma),
        ("curvature vs intrinsic oracle", curvature_oracle),
        ("tangent, k-surface mode", || tangent_coefficients(Mode::KSurface)),
        ("tangent, cmc mode", || tangent_coefficients(Mode::Cmc)),
        ("parallel distance", parallel_distance),
        ("derivative structure at the origin", derivative_structure),
        ("linearization oracle", linearization_oracle),
        ("invariant suites", invariant_suites),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(v) => {
                println!(
                    "{} criterion {n} ({name}): {}",
                    if v.passed { "PASS" } else { "FAIL" },
                    v.detail
                );
                match (v.passed, v.expected_failure) {
                    (true, None) => {}
                    (false, Some(Ok(why))) => {
                        println!("     criterion {n} expected failure: {why}")
                    }
                    (_, Some(Err(why))) => {
                        println!("     criterion {n} unexpected: {why}");
                        unexpected += 1;
                    }
                    (true, Some(Ok(_))) | (false, None) => unexpected += 1,
                }
            }
            Err(e) => {
                println!("FAIL criterion {n} ({name}): error: {e}");
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        println!("acceptance: all criteria at their expected outcome");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} criteria off their expected outcome");
        ExitCode::FAILURE
    }
}
