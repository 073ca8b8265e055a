use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epstein_core::asymptotics::rescaled_forms_with;
use epstein_core::conformal::{ConformalMetricField, StripMetric};
use epstein_core::epstein::sample_mesh_with;
use epstein_core::foliation::{
    continuation, intrinsic_B, Mode, ModelSurface, PhiSpec, SolverConfig, SurfaceSpec,
};
use epstein_core::Exec;
use num_complex::Complex64;
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn surface(nx: usize, ny: usize) -> ModelSurface {
    let phi = PhiSpec::Fourier {
        amplitude: Complex64::new(0.05, 0.0),
        mode: 0,
    };
    ModelSurface::new(SurfaceSpec::cylinder(
        2.0 * std::f64::consts::PI,
        3.0,
        nx,
        ny,
        phi,
    ))
    .unwrap()
}

fn kernels(c: &mut Criterion) {
    let s = surface(256, 128);
    let field: Vec<f64> = s.h().eta().to_vec();

    let mut g = c.benchmark_group("partials");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(s.ops().partials_with(black_box(&field), exec)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("metric_from_closure");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                black_box(
                    ConformalMetricField::from_closure_with(s.grid(), &StripMetric, exec).unwrap(),
                )
            })
        });
    }
    g.finish();

    let sigma = s.h().scaled(40.0).unwrap();
    let bq = intrinsic_B(&sigma, &s).unwrap();
    let dev = s.developing_map();
    let mut g = c.benchmark_group("sample_mesh");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(sample_mesh_with(&sigma, &bq, Some(&dev), exec).unwrap()))
        });
    }
    g.finish();
}

fn asymptotics(c: &mut Criterion) {
    let s = surface(128, 64);
    let branch = continuation(
        Mode::KSurface,
        &[-0.08, -0.04, -0.02, -0.01],
        &s,
        &SolverConfig::default(),
    )
    .unwrap();
    let mut g = c.benchmark_group("rescaled_forms");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(rescaled_forms_with(&branch, &s, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels, asymptotics);
criterion_main!(benches);
