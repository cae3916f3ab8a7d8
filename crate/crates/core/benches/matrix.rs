//! Compares sequential and worker-pool execution of the experiment
//! matrix on a small synthetic instance set.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use evrptw_core::bench::{run_matrix, BenchConfig};
use evrptw_core::instance::Instance;
use evrptw_core::synth::{random_instance, SynthConfig};

fn instance_set() -> Vec<Instance> {
    (0..4u64)
        .map(|seed| {
            random_instance(
                &SynthConfig {
                    customers: 5,
                    stations: 1,
                    ..SynthConfig::default()
                },
                seed + 400,
            )
        })
        .collect()
}

fn bench_matrix(c: &mut Criterion) {
    let instances = instance_set();
    let coverages = [0.0, 0.3, 0.6];
    let mut group = c.benchmark_group("coverage_matrix");
    group.sample_size(10);
    for workers in [1usize, 4] {
        group.bench_with_input(
            BenchmarkId::new("workers", workers),
            &workers,
            |b, &workers| {
                let config = BenchConfig {
                    workers,
                    ..BenchConfig::default()
                };
                b.iter(|| run_matrix(&instances, &coverages, &config).unwrap());
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_matrix);
criterion_main!(benches);
