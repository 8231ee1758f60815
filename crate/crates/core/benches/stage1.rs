//! Stage-one benchmarks: parallel rayon fits against the sequential
//! fallback, and the spline estimator against the local-polynomial
//! baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pdeid::localpoly::{localpoly_fit_slice, LocalPolyConfig};
use pdeid::simulate::transport_field;
use pdeid::spline::{default_alpha, estimate_derivatives, estimate_derivatives_seq};
use pdeid::{Field, Grid1D};

fn bench_field(m: usize, n: usize) -> Field {
    let grid = Grid1D::uniform(m, n, 1.0, 0.1).unwrap();
    transport_field(&grid, -2.0, 2.0, 4.0).unwrap()
}

fn spline_parallel_vs_sequential(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_derivatives");
    for &(m, n) in &[(100, 100), (200, 200)] {
        let field = bench_field(m, n);
        let (ax, at) = (default_alpha(m), default_alpha(n));
        group.bench_with_input(BenchmarkId::new("parallel", format!("{m}x{n}")), &field, |b, f| {
            b.iter(|| estimate_derivatives(black_box(f), ax, at).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", format!("{m}x{n}")), &field, |b, f| {
            b.iter(|| estimate_derivatives_seq(black_box(f), ax, at).unwrap())
        });
    }
    group.finish();
}

fn spline_vs_localpoly(c: &mut Criterion) {
    let mut group = c.benchmark_group("stage1_methods");
    group.sample_size(10);
    let (m, n) = (200, 20);
    let field = bench_field(m, n);
    let (ax, at) = (default_alpha(m), default_alpha(n));
    group.bench_function("spline_200x20", |b| {
        b.iter(|| estimate_derivatives(black_box(&field), ax, at).unwrap())
    });
    let cfg_x = LocalPolyConfig::new(2);
    group.bench_function("localpoly_200x20_x_axis", |b| {
        b.iter(|| {
            let x = field.grid().x();
            for k in 0..field.grid().n() {
                let fit =
                    localpoly_fit_slice(black_box(field.time_slice(k)), x, x, &cfg_x).unwrap();
                black_box(fit);
            }
        })
    });
    group.finish();
}

criterion_group!(benches, spline_parallel_vs_sequential, spline_vs_localpoly);
criterion_main!(benches);
