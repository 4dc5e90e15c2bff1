use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use nanolase::engine::{simulate_with, SimConfig};
use nanolase::master::solve_steady_state;
use nanolase::observables::{g1, spectrum};
use nanolase::LaserParams;

fn stochastic_engine(c: &mut Criterion) {
    let params = LaserParams::photonic_crystal(0.6);
    let cfg = SimConfig::new(2000.0, 0.0, 1.0);
    let events: u64 = simulate_with(&params, 1, &cfg).unwrap().event_counts.iter().sum();
    let mut group = c.benchmark_group("ssa");
    group.throughput(Throughput::Elements(events));
    group.bench_function("five_emitters_2ns", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            simulate_with(&params, seed, &cfg).unwrap()
        })
    });
    group.finish();
}

fn master_equation(c: &mut Criterion) {
    let mut group = c.benchmark_group("master_equation");
    group.sample_size(10);
    for n0 in [1u32, 2, 3] {
        let params = LaserParams::photonic_crystal(0.3).with_emitters(n0);
        group.bench_function(format!("steady_state_n0_{n0}"), |b| {
            b.iter(|| solve_steady_state(&params).unwrap())
        });
    }
    group.finish();
}

fn coherence(c: &mut Criterion) {
    let params = LaserParams::photonic_crystal(0.6);
    let traj = simulate_with(&params, 7, &SimConfig::new(20_000.0, 500.0, 0.5)).unwrap();
    let trajs = vec![traj];
    let mut group = c.benchmark_group("coherence");
    group.bench_function("g1_4096_lags", |b| b.iter(|| g1(&trajs, 4096).unwrap()));
    group.bench_function("spectrum_4096_lags", |b| {
        b.iter_batched(|| g1(&trajs, 4096).unwrap(), |est| spectrum(&est), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, stochastic_engine, master_equation, coherence);
criterion_main!(benches);
