use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lslab_bench::{flat_line, neck_chain};
use lslab_core::functional::{el_residual, evaluate_log_sobolev, functional_gradient};
use lslab_core::grid::{DiscreteField, Grid};
use lslab_core::solver::{minimize_log_sobolev, SolverOptions};

fn bench_functional(c: &mut Criterion) {
    let domain = flat_line(10.0);
    let mut group = c.benchmark_group("functional");
    for &dx in &[1e-2, 1e-3] {
        let grid = Grid::new(&domain, dx).unwrap();
        let v = DiscreteField::from_fn(grid, |x| {
            (4.0 * std::f64::consts::PI).powf(-0.25) * (-(x - 10.0) * (x - 10.0) / 8.0).exp()
        })
        .normalized()
        .unwrap();
        group.bench_with_input(BenchmarkId::new("evaluate", dx), &v, |b, v| {
            b.iter(|| evaluate_log_sobolev(black_box(v), &domain).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gradient", dx), &v, |b, v| {
            b.iter(|| functional_gradient(black_box(v), &domain).unwrap())
        });
        let lambda = 1.0 + 0.5 * (4.0 * std::f64::consts::PI).ln();
        group.bench_with_input(BenchmarkId::new("el_residual", dx), &v, |b, v| {
            b.iter(|| el_residual(black_box(v), lambda, &domain).unwrap())
        });
    }
    group.finish();
}

fn bench_minimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    let opts = SolverOptions { restarts: 2, ..Default::default() };
    group.bench_function("flat_line_dx_1e-2", |b| {
        let domain = flat_line(10.0);
        b.iter(|| minimize_log_sobolev(black_box(&domain), &opts).unwrap())
    });
    group.bench_function("neck_host_h_0.2", |b| {
        let domain = neck_chain(0.2, 4.0);
        b.iter(|| minimize_log_sobolev(black_box(&domain), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_functional, bench_minimize);
criterion_main!(benches);
