use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crnbal_bench::{load, BISTABLE, PHOSPHOFRUCTOKINASE};
use crnbal_core::stochastic::{occupation_distribution, stationary_birth_death, stationary_rndb};

fn stationary(c: &mut Criterion) {
    let (net, rates) = load(PHOSPHOFRUCTOKINASE);
    let mut group = c.benchmark_group("stationary_rndb");
    group.sample_size(10);
    for cap in [10, 20] {
        group.bench_with_input(BenchmarkId::from_parameter(cap), &cap, |b, &cap| {
            b.iter(|| stationary_rndb(&net, &rates, &[0, 0, 0], cap).unwrap())
        });
    }
    group.finish();

    let (net, rates) = load(BISTABLE);
    c.bench_function("stationary_birth_death/200", |b| {
        b.iter(|| stationary_birth_death(&net, &rates, 200).unwrap())
    });
}

fn gillespie(c: &mut Criterion) {
    let (net, rates) = load(BISTABLE);
    let mut group = c.benchmark_group("gillespie");
    group.sample_size(10);
    group.bench_function("bistable/t_end=1e3", |b| {
        b.iter(|| occupation_distribution(&net, &rates, &[5], 1e3, 0.1, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, stationary, gillespie);
criterion_main!(benches);
