use std::hint::black_box;

use conelcp_core::classify::{has_f_property, symmetrizant};
use conelcp_core::lcp::{enumerate_solutions, lemke_solve, ClassicalLcp};
use conelcp_core::linalg::sym_eigen;
use conelcp_core::orbit::positivize;
use conelcp_core::random::{normal_matrix, normal_vector, p_matrix, rng};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    for m in [4, 8, 16, 32] {
        let s = symmetrizant(&normal_matrix(&mut rng(m as u64), m));
        group.bench_with_input(BenchmarkId::from_parameter(m), &s, |b, s| {
            b.iter(|| sym_eigen(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn lemke(c: &mut Criterion) {
    let mut group = c.benchmark_group("lemke_p_matrix");
    for m in [4, 8, 12] {
        let mut r = rng(m as u64);
        let p = ClassicalLcp::new(p_matrix(&mut r, m), normal_vector(&mut r, m)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &p, |b, p| {
            b.iter(|| lemke_solve(black_box(p), None).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_enumeration");
    group.sample_size(20);
    for m in [4, 8, 10] {
        let mut r = rng(m as u64);
        let p = ClassicalLcp::new(normal_matrix(&mut r, m), normal_vector(&mut r, m)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &p, |b, p| {
            b.iter(|| enumerate_solutions(black_box(p), 1e-9).unwrap())
        });
    }
    group.finish();
}

fn f_test(c: &mut Criterion) {
    let mut group = c.benchmark_group("f_property");
    for m in [4, 8, 12] {
        let a = normal_matrix(&mut rng(m as u64), m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &a, |b, a| {
            b.iter(|| has_f_property(black_box(a), 1e-9).unwrap())
        });
    }
    group.finish();
}

fn positivization(c: &mut Criterion) {
    let mut group = c.benchmark_group("positivize");
    for m in [4, 8, 12] {
        let mut a = normal_matrix(&mut rng(m as u64), m);
        a[(0, 0)] = a[(0, 0)].abs() + 0.5;
        group.bench_with_input(BenchmarkId::from_parameter(m), &a, |b, a| {
            b.iter(|| positivize(black_box(a), 1e-9).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, jacobi, lemke, enumeration, f_test, positivization);
criterion_main!(benches);
