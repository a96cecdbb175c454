use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sdoflab_bench::fixture;
use sdoflab::entropy::{SchemeSweep, DEFAULT_POWER_GRID};
use sdoflab::sampling::rng_from_seed;
use sdoflab::{construct_wth_scheme, verify, RationalGrid};

fn rank(c: &mut Criterion) {
    let grid = RationalGrid::default();
    let mut group = c.benchmark_group("rank");
    for size in [4usize, 8, 16] {
        let m = grid.sample_matrix(size, size, &mut rng_from_seed(size as u64));
        group.bench_with_input(BenchmarkId::from_parameter(size), &m, |b, m| b.iter(|| black_box(m).rank()));
    }
    group.finish();
}

fn construct_and_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct_verify");
    for (n, k) in [(1usize, 1usize), (2, 3), (4, 4)] {
        let (r, stacked, _) = fixture(n, k, 7);
        group.bench_function(format!("N{n}_K{k}"), |b| {
            b.iter(|| {
                let s = construct_wth_scheme(r.legitimate(), 11, RationalGrid::default()).unwrap();
                verify(&s, &stacked).unwrap()
            })
        });
    }
    group.finish();
}

fn entropy_sweep(c: &mut Criterion) {
    let (_, stacked, s) = fixture(3, 2, 5);
    c.bench_function("entropy_sweep_N3_K2", |b| {
        b.iter(|| SchemeSweep::run(black_box(&s), &stacked, &DEFAULT_POWER_GRID).unwrap())
    });
}

criterion_group!(benches, rank, construct_and_verify, entropy_sweep);
criterion_main!(benches);
