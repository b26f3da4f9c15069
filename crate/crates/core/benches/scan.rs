use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use threephase::oracle::translation_max_with;
use threephase::verify::{verify_with, VerifyConfig};
use threephase::{CompositeSpec, Execution, Materials, Region};

fn oracle_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_scan");
    let points = [("B", 0.12, 0.8), ("C", 0.2, 0.2), ("E", 0.5, 0.05)];
    for (name, m1, rho) in points {
        let spec = CompositeSpec::from_compliances([1.0, 2.0, 3.0, 4.0], m1, 0.35, rho).unwrap();
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), &spec, |b, s| {
                b.iter(|| translation_max_with(black_box(s), exec))
            });
        }
    }
    group.finish();
}

fn verify_batch(c: &mut Criterion) {
    let mats = Materials::from_compliances([1.0, 2.0, 3.0, 4.0]).unwrap();
    let config = VerifyConfig {
        samples: 20,
        regions: Region::CLOSED_FORM.to_vec(),
        ..Default::default()
    };
    let mut group = c.benchmark_group("verify_batch");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| verify_with(&mats, black_box(&config), exec)));
    }
    group.finish();
}

criterion_group!(benches, oracle_scan, verify_batch);
criterion_main!(benches);
