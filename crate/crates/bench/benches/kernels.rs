use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use transmutant::{
    build_table, darboux_kernel, darboux_transform, reference_kernel, solve_kernel, GoursatOptions,
    Grid, Potential, Samples,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rational_q(n: usize) -> Samples {
    let grid = Grid::new(0.5, n).unwrap();
    Samples::from_real_fn(grid, reference_kernel("rational_n1").unwrap().q)
}

fn goursat(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_kernel");
    group.sample_size(10);
    for n in [101, 201, 401] {
        let q = rational_q(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| {
            b.iter(|| solve_kernel(q, re(-1.0), &GoursatOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    for n in [201, 401, 801] {
        let grid = Grid::new(0.5, n).unwrap();
        let kernel = reference_kernel("rational_n1").unwrap().sample(grid);
        let u = Samples::from_real_fn(grid, f64::cos);
        group.bench_with_input(BenchmarkId::new("forward", n), &u, |b, u| {
            b.iter(|| kernel.apply(u).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("inverse", n), &u, |b, u| {
            b.iter(|| kernel.apply_inverse(u).unwrap())
        });
    }
    group.finish();
}

fn darboux(c: &mut Criterion) {
    let mut group = c.benchmark_group("darboux_kernel");
    for n in [201, 401] {
        let grid = Grid::new(0.5, n).unwrap();
        let source = reference_kernel("rational_n1_h2").unwrap();
        let k1 = source.sample(grid);
        let q = Samples::from_real_fn(grid, source.q);
        let pair = darboux_transform(&Potential::from_initial_slope(&q, re(2.0)).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &k1, |b, k1| {
            b.iter(|| darboux_kernel(k1, &pair).unwrap())
        });
    }
    group.finish();
}

fn formal_powers(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_table");
    let q = rational_q(401);
    let p = Potential::from_initial_slope(&q, re(-1.0)).unwrap();
    for k_max in [10, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(k_max), &k_max, |b, &k| {
            b.iter(|| build_table(&p, 0.0, k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, goursat, apply, darboux, formal_powers);
criterion_main!(benches);
