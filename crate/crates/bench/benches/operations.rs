use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmeasure::diagbox::diag_length;
use qmeasure::grade2::reconstruct;
use qmeasure::interference::is_grade_additive;
use qmeasure::kernel::walsh_block;
use qmeasure::SemivariationMode;
use qmeasure_bench::{random_boxes, random_diagonal, random_polymeasure};

fn grade_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_grade_additive");
    for (k, d) in [(4, 2), (6, 2), (6, 3), (8, 3)] {
        let mu = random_diagonal(k, d, 1);
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), k), &mu, |b, mu| {
            b.iter(|| is_grade_additive(black_box(mu), d).unwrap())
        });
    }
    group.finish();
}

fn reconstruction(c: &mut Criterion) {
    let mu = random_diagonal(10, 2, 2);
    c.bench_function("reconstruct/k10", |b| b.iter(|| reconstruct(black_box(&mu))));
}

fn semivariation(c: &mut Criterion) {
    let mut group = c.benchmark_group("semivariation");
    for k in [6, 10, 14] {
        let lambda = random_polymeasure(k, 2, 3);
        group.bench_with_input(BenchmarkId::new("exact", k), &lambda, |b, l| {
            b.iter(|| l.semivariation(SemivariationMode::Exact).unwrap())
        });
    }
    let kernel = walsh_block(6).unwrap();
    group.bench_function("sampled/walsh6", |b| {
        b.iter(|| kernel.semivariation(SemivariationMode::Sampled { seed: 0, trials: 64 }).unwrap())
    });
    group.finish();
}

fn diagonal_length(c: &mut Criterion) {
    let mut group = c.benchmark_group("diag_length");
    for boxes in [6, 64, 512] {
        let t = random_boxes(4, boxes, 4);
        group.bench_with_input(BenchmarkId::from_parameter(boxes), &t, |b, t| {
            b.iter(|| diag_length(black_box(t)))
        });
    }
    group.finish();
}

criterion_group!(benches, grade_check, reconstruction, semivariation, diagonal_length);
criterion_main!(benches);
