use std::hint::black_box;

use contact_core::chain::{hitting_prob_exact, make_params, ChainMode};
use contact_core::graph::{generate_config_model, generate_star, max_eigenvalue, DegreeDistribution};
use contact_core::rng::replica_rng;
use contact_core::sim::{simulate, simulate_star, StarState, StopCondition};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    let stop = StopCondition::FirstOf(vec![StopCondition::Extinction, StopCondition::TimeHorizon(20.0)]);
    for k in [100usize, 1000] {
        let g = generate_star(k).unwrap();
        let mut r = 0u64;
        group.bench_with_input(BenchmarkId::new("star_full", k), &g, |b, g| {
            b.iter(|| {
                r += 1;
                simulate(g, 1.0, &[0], &stop, &mut replica_rng(1, r)).unwrap()
            })
        });
        let mut r = 0u64;
        group.bench_with_input(BenchmarkId::new("star_reduced", k), &k, |b, &k| {
            b.iter(|| {
                r += 1;
                simulate_star(k, 1.0, StarState::new(0, 1), &stop, &mut replica_rng(1, r)).unwrap()
            })
        });
    }
    let g = generate_config_model(2000, DegreeDistribution::PowerLawTail(2.5), &mut replica_rng(5, 0)).unwrap();
    let mut r = 0u64;
    group.bench_function("config_n2000", |b| {
        b.iter(|| {
            r += 1;
            simulate(&g, 0.5, &[0], &stop, &mut replica_rng(2, r)).unwrap()
        })
    });
    group.finish();
}

fn bench_hitting(c: &mut Criterion) {
    let mut group = c.benchmark_group("hitting_prob_exact");
    for k in [60usize, 1000, 10_000] {
        let p = make_params(1.0, k, ChainMode::FixedP).unwrap();
        let a = p.floor_l / 2;
        group.bench_with_input(BenchmarkId::from_parameter(k), &p, |b, p| {
            b.iter(|| hitting_prob_exact(black_box(p), a, 1, p.floor_l).unwrap())
        });
    }
    group.finish();
}

fn bench_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_eigenvalue");
    for n in [1000usize, 10_000] {
        let g = generate_config_model(n, DegreeDistribution::StretchedExpTail(2.0), &mut replica_rng(6, n as u64)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| max_eigenvalue(black_box(g), 1e-10, 1_000_000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_simulate, bench_hitting, bench_eigen);
criterion_main!(benches);
