use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use modesig_core::boot::bootstrap_hessian;
use modesig_core::persist::persistence_test;
use modesig_core::synth::presets;
use modesig_core::{find_modes, generate, DensityModel, MeanShiftOptions};

fn kde(c: &mut Criterion) {
    let data = generate(&presets::two_gaussians_10d(2000, 1)).unwrap();
    let model = DensityModel::new(data, 1.0).unwrap();
    let x = vec![0.5; 10];
    c.bench_function("hessian 10-d n=2000", |b| b.iter(|| model.hessian(black_box(&x)).unwrap()));
}

fn mean_shift(c: &mut Criterion) {
    let data = generate(&presets::three_gaussians_1d(400, 2)).unwrap();
    let model = DensityModel::new(data.clone(), 1.0).unwrap();
    let opts = MeanShiftOptions::default();
    c.bench_function("mean shift 1-d n=400", |b| {
        b.iter(|| find_modes(&model, black_box(&data), &opts).unwrap())
    });
}

fn bootstrap(c: &mut Criterion) {
    let data = generate(&presets::ring_with_blobs(500, 3)).unwrap();
    c.bench_function("bootstrap hessian 2-d n=500 B=200", |b| {
        b.iter(|| bootstrap_hessian(&data, 0.5, black_box(&[12.0, 0.0]), 200, 7).unwrap())
    });
}

fn persistence(c: &mut Criterion) {
    let data = generate(&presets::ring_with_blobs(500, 4)).unwrap();
    let mut group = c.benchmark_group("persistence");
    group.sample_size(10);
    group.bench_function("2-d 64x64 B=100", |b| {
        b.iter(|| persistence_test(black_box(&data), 0.5, 64, 0.1, 100, 5).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kde, mean_shift, bootstrap, persistence);
criterion_main!(benches);
