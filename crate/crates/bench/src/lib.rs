//! Benchmark bodies, shared by the bench targets.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use treefid::analysis::{me_placement, PlacementStrategy};
use treefid::{
    build_tree, census_closed_form, census_enumerate, entanglement_swap, favg_closed,
    favg_weighted, run_trials, werner_state, TreeKind, WeightedNetwork, WernerParam,
};

fn p(x: f64) -> WernerParam {
    WernerParam::new(x).unwrap()
}

pub fn closed_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("favg_closed");
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 60 } else { 10_000 };
        g.bench_with_input(BenchmarkId::new(kind.as_str(), d), &d, |b, &d| {
            b.iter(|| favg_closed(kind, black_box(d), p(0.9)).unwrap())
        });
    }
    g.finish();

    c.bench_function("census_closed_form/USBT/1000", |b| {
        b.iter(|| census_closed_form(TreeKind::Usbt, black_box(1000)).unwrap())
    });
}

pub fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("census_enumerate");
    g.sample_size(10);
    for d in [7u32, 9, 11] {
        let tree = build_tree(TreeKind::Usbt, d).unwrap();
        g.bench_with_input(BenchmarkId::new("USBT", d), &tree, |b, t| {
            b.iter(|| census_enumerate(t).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("favg_weighted");
    g.sample_size(10);
    for d in [6u32, 9] {
        let net = WeightedNetwork::uniform(build_tree(TreeKind::Usbt, d).unwrap(), p(0.7));
        g.bench_with_input(BenchmarkId::new("USBT", d), &net, |b, n| {
            b.iter(|| favg_weighted(n).unwrap())
        });
    }
    g.finish();
}

pub fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trials");
    g.sample_size(10);
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 6 } else { 63 };
        g.bench_function(BenchmarkId::new(kind.as_str(), 100), |b| {
            b.iter(|| run_trials(kind, d, 100, black_box(42)).unwrap())
        });
    }
    g.finish();
}

pub fn placements(c: &mut Criterion) {
    let mut g = c.benchmark_group("me_placement_exhaustive");
    g.sample_size(10);
    for kind in TreeKind::ALL {
        let d = if kind.is_symmetric() { 3 } else { 7 };
        g.bench_function(BenchmarkId::new(kind.as_str(), 7), |b| {
            b.iter(|| {
                me_placement(
                    kind,
                    d,
                    p(0.333),
                    black_box(7),
                    PlacementStrategy::Exhaustive,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

pub fn swap(c: &mut Criterion) {
    let (a, b) = (werner_state(p(0.8)), werner_state(p(0.6)));
    c.bench_function("entanglement_swap", |bench| {
        bench.iter(|| entanglement_swap(black_box(&a), black_box(&b)).unwrap())
    });
}
