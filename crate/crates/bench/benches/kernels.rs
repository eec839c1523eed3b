use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dynsamp_bench::{single_vector_system, tridiagonal};
use dynsamp_core::criteria::{carleson_disc, fixtures};
use dynsamp_core::observability::{frame_report, grammian};
use dynsamp_core::{TimeDomain, Tolerances};

fn matrix_exponential(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for n in [4, 16, 64] {
        let a = tridiagonal(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| a.exp(black_box(3.0))));
    }
    group.finish();
}

fn grammians(c: &mut Criterion) {
    let mut group = c.benchmark_group("grammian");
    for n in [4, 16] {
        let discrete = single_vector_system(n, TimeDomain::discrete(4 * n));
        let continuous = single_vector_system(n, TimeDomain::continuous(2.0));
        group.bench_with_input(BenchmarkId::new("discrete", n), &discrete, |b, s| b.iter(|| grammian(s)));
        group.bench_with_input(BenchmarkId::new("continuous", n), &continuous, |b, s| b.iter(|| grammian(s)));
    }
    let tol = Tolerances::default();
    let sys = single_vector_system(16, TimeDomain::continuous(2.0));
    group.bench_function("frame_report/16", |b| b.iter(|| frame_report(&sys, &tol)));
    group.finish();
}

fn carleson(c: &mut Criterion) {
    let mut group = c.benchmark_group("carleson_disc");
    for n in [12, 48] {
        let lambdas = fixtures::disc_pass_family(n).lambdas().to_vec();
        group.bench_with_input(BenchmarkId::from_parameter(n), &lambdas, |b, l| b.iter(|| carleson_disc(l, 1e-6)));
    }
    group.finish();
}

criterion_group!(benches, matrix_exponential, grammians, carleson);
criterion_main!(benches);
