use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fleetsim_core::maps::benchmark_map;
use fleetsim_core::{run, SimConfig};

fn simulator(c: &mut Criterion) {
    let map = Arc::new(benchmark_map("empty-32-32").expect("known map"));
    let mut group = c.benchmark_group("simulator");
    group.sample_size(10);
    for agents in [20usize, 60] {
        let mut cfg = SimConfig::new(agents, 1);
        cfg.duration = 60.0;
        group.bench_with_input(BenchmarkId::new("windowed_60s", agents), &cfg, |b, cfg| {
            b.iter(|| run(Arc::clone(&map), cfg).expect("run succeeds"))
        });
    }
    group.finish();
}

criterion_group!(benches, simulator);
criterion_main!(benches);
