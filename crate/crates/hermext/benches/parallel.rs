//! Benchmarks comparing the rayon batch maps against the sequential
//! reference on the two heaviest verification workloads: the Hecke
//! two-torsion sweep and the block-determinant random-word batch.
//!
//! Build with `--no-default-features` to measure the pure sequential crate;
//! with the default `parallel` feature both paths are available and the
//! `*_parallel` benches fan out over the rayon pool.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hermext::verify::{hecke_sweep, hecke_sweep_seq, block_det_batch, block_det_batch_seq};

fn bench_hecke(c: &mut Criterion) {
    let mut group = c.benchmark_group("hecke_sweep_200");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let results = hecke_sweep(black_box(200));
            assert!(results.iter().all(|(_, ok)| *ok));
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let results = hecke_sweep_seq(black_box(200));
            assert!(results.iter().all(|(_, ok)| *ok));
        })
    });
    group.finish();
}

fn bench_block_dets(c: &mut Criterion) {
    let mut group = c.benchmark_group("block_det_words_m5");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| assert!(block_det_batch(black_box(5), black_box(200))))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| assert!(block_det_batch_seq(black_box(5), black_box(200))))
    });
    group.finish();
}

criterion_group!(benches, bench_hecke, bench_block_dets);
criterion_main!(benches);
