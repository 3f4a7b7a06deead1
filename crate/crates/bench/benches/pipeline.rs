use std::hint::black_box;

use annulus_div::coefficients::identities::check_identities;
use annulus_div::coefficients::{composed_q, CorrectionOrder, CorrectionSystem};
use annulus_div::sphere::{forward_transform, SphereGrid};
use annulus_div::{assemble_solution, run_suite, Resolution, VerifyConfig};
use annulus_div_bench::{loaded_source, unit_annulus};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::sync::Arc;

fn coefficients(c: &mut Criterion) {
    c.bench_function("composed_q n=3", |b| b.iter(|| composed_q(black_box(3), 1.0, 2.0).unwrap()));
    let system = CorrectionSystem::new(CorrectionOrder::ValuesAndSlopes, 3, 1.0, 2.0).unwrap();
    c.bench_function("quartic solve", |b| b.iter(|| system.solve(black_box(&[0.3, -0.2, 1.0, 0.5])).unwrap()));
    c.bench_function("identities n=20", |b| b.iter(|| check_identities(black_box(20)).unwrap()));
}

fn sphere(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_transform");
    for band in [8, 16, 32] {
        let grid = Arc::new(SphereGrid::for_band(3, band).unwrap());
        let g = grid.sample(|y| y[0] * y[1] + y[2].powi(3));
        group.bench_with_input(BenchmarkId::from_parameter(band), &band, |b, &band| {
            b.iter(|| forward_transform(&g, band).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    for n in [2, 3] {
        let d = unit_annulus(n);
        let src = loaded_source(&d);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| assemble_solution(src.clone(), &d, Resolution::default_for(n)).unwrap())
        });
    }
    group.finish();

    let d = unit_annulus(3);
    let sol = assemble_solution(loaded_source(&d), &d, Resolution::default_for(3)).unwrap();
    c.bench_function("eval U n=3", |b| b.iter(|| sol.eval(black_box(&[1.1, 0.4, -0.6])).unwrap()));
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("run_suite n=3", |b| b.iter(|| run_suite(&sol, &VerifyConfig::default())));
    group.finish();
}

criterion_group!(benches, coefficients, sphere, assembly);
criterion_main!(benches);
