use std::f64::consts::{FRAC_PI_2, PI};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use tandyn_core::raster::render_dynamical;
use tandyn_core::{
    normalize_lambda, tan_stable, ClassifyConfig, EvalLimits, GridSpec, OrbitClassifier,
};

fn tan(c: &mut Criterion) {
    let limits = EvalLimits::default();
    let points = [
        Complex64::new(0.3, -0.7),
        Complex64::new(1e4 + 0.25, 2.0),
        Complex64::new(1.0, -40.0),
    ];
    c.bench_function("tan_stable", |b| {
        b.iter(|| {
            for &z in &points {
                black_box(tan_stable(black_box(z), &limits));
            }
        })
    });
}

fn classify(c: &mut Criterion) {
    let wandering = OrbitClassifier::new(
        normalize_lambda(Complex64::new(PI, FRAC_PI_2)),
        ClassifyConfig::default(),
        EvalLimits::default(),
    )
    .unwrap();
    let lobe = OrbitClassifier::new(
        normalize_lambda(Complex64::new(0.0, 1.5)),
        ClassifyConfig::default(),
        EvalLimits::default(),
    )
    .unwrap();
    let cp = Complex64::new(FRAC_PI_2, -0.881_373_587_019_543);
    c.bench_function("classify/wandering", |b| {
        b.iter(|| wandering.classify(black_box(cp)))
    });
    c.bench_function("classify/lobe", |b| {
        b.iter(|| lobe.classify(black_box(Complex64::new(0.2, -0.4))))
    });
}

fn render(c: &mut Criterion) {
    let param = normalize_lambda(Complex64::new(0.0, 1.5));
    let spec = GridSpec::new(Complex64::new(0.0, -1.0), 4.0 * PI, 4.0 * PI, 64, 64).unwrap();
    let cfg = ClassifyConfig::default();
    let limits = EvalLimits::default();
    let mut group = c.benchmark_group("render");
    group.sample_size(20);
    group.bench_function("dynamical_64x64", |b| {
        b.iter(|| render_dynamical(&param, &spec, &cfg, &limits).unwrap())
    });
    group.finish();
}

criterion_group!(benches, tan, classify, render);
criterion_main!(benches);
