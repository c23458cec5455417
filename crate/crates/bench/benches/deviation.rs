// SPDX-License-Identifier: MIT OR Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rnsp_bench::gaussian_noise;
use rnsp_core::deviation::{deviation_exhaustive, DeviationEvaluator};
use rnsp_core::{msup_norm_all, msup_norm_lr, SignVector};

fn deviation(c: &mut Criterion) {
    let mut group = c.benchmark_group("deviation");
    for n in [32, 128, 512] {
        let y = gaussian_noise(n, 1);
        let evaluator = DeviationEvaluator::new(n);
        group.bench_with_input(BenchmarkId::new("evaluator", n), &y, |b, y| {
            b.iter(|| evaluator.evaluate(y, None).unwrap())
        });
        if n <= 128 {
            group.bench_with_input(BenchmarkId::new("exhaustive", n), &y, |b, y| {
                b.iter(|| deviation_exhaustive(y, None).unwrap())
            });
        }
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("norm");
    for n in [64, 512] {
        let x = SignVector::signs_of(&gaussian_noise(n, 2));
        group.bench_with_input(BenchmarkId::new("lr", n), &x, |b, x| {
            b.iter(|| msup_norm_lr(x).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("all", n), &x, |b, x| {
            b.iter(|| msup_norm_all(x))
        });
    }
    group.finish();
}

criterion_group!(benches, deviation, norms);
criterion_main!(benches);
