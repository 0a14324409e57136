//! Parallel against sequential replica execution on two workloads: short
//! exit walks (many cheap replicas) and small aggregates (fewer, heavier ones).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idla_core::cluster::ClusterLimits;
use idla_core::harness::{idla_replica, map_replicas, Execution};
use idla_core::increments::{IncrementLaw, LawSpec};
use idla_core::rng::replica_stream;
use idla_core::walker::{run_until_exit, Interval, WalkOptions};

fn exits(c: &mut Criterion) {
    let law = IncrementLaw::new(LawSpec::stable(1.5)).unwrap();
    let interval = Interval::symmetric(200);
    let mut g = c.benchmark_group("exit_walks_x1000");
    for exec in [Execution::Parallel, Execution::Sequential] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                map_replicas(1000, exec, |i| {
                    run_until_exit(&law, 0, interval, &mut replica_stream(7, i), WalkOptions::default())
                        .unwrap()
                        .steps
                })
            })
        });
    }
    g.finish();
}

fn aggregates(c: &mut Criterion) {
    let law = IncrementLaw::new(LawSpec::two_step()).unwrap();
    let limits = ClusterLimits::default();
    let mut g = c.benchmark_group("idla_m300_x16");
    g.sample_size(10);
    for exec in [Execution::Parallel, Execution::Sequential] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| map_replicas(16, exec, |i| black_box(idla_replica(&law, 3, i, 300, &[300], &limits).unwrap().steps)))
        });
    }
    g.finish();
}

criterion_group!(benches, exits, aggregates);
criterion_main!(benches);
