//! Sequential against data-parallel sweeps, and the cost of one key-rate
//! evaluation per Holevo-bound method.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cvqkd_core::analysis::{run_sweep_with, Axis, ExecutionMode, Nuisance, Parameter, SweepSpec};
use cvqkd_core::protocols::{
    evaluate_key_rate, ChannelParams, Direction, Method, ProtocolParams, PurificationConfig,
};

fn detection_noise_sweep(points: usize) -> SweepSpec {
    let p = ProtocolParams::squeezed(0.1, Direction::Reverse)
        .with_modulation(1e6)
        .with_preparation_noise(0.1);
    let step = 3.0 / points as f64;
    SweepSpec::new("bench", p, ChannelParams::new(0.1, 0.18).unwrap())
        .with_method(Method::Purification)
        .with_axis(Axis::range(Parameter::DetectionNoise, step, 3.0, step).unwrap())
}

fn optimized_distance_sweep() -> SweepSpec {
    let p = ProtocolParams::coherent(Direction::Reverse).with_beta(0.95);
    SweepSpec::new("bench", p, ChannelParams::new(1.0, 0.01).unwrap())
        .optimizing(&[Nuisance::Modulation])
        .with_axis(Axis::range(Parameter::DistanceKm, 5.0, 100.0, 5.0).unwrap())
}

fn execution_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let cases = [
        ("purification_grid_64", detection_noise_sweep(64)),
        ("optimized_modulation_20", optimized_distance_sweep()),
    ];
    for (name, spec) in &cases {
        for mode in [ExecutionMode::Sequential, ExecutionMode::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(*name, format!("{mode:?}")),
                spec,
                |b, s| b.iter(|| run_sweep_with(black_box(s), mode).unwrap()),
            );
        }
    }
    group.finish();
}

fn single_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("key_rate");
    let p = ProtocolParams::coherent(Direction::Reverse)
        .with_modulation(1e6)
        .with_detection_noise(0.5);
    let ch = ChannelParams::new(0.1, 0.18).unwrap();
    let cfg = PurificationConfig::default();
    for method in [Method::Cloner, Method::Purification] {
        group.bench_function(format!("{method:?}"), |b| {
            b.iter(|| evaluate_key_rate(black_box(&p), black_box(&ch), &cfg, method).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, execution_modes, single_evaluation);
criterion_main!(benches);
