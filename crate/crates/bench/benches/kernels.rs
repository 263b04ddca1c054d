use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fractform_bench::{cantor_setup, koch_field, koch_setup};
use fractform_core::geomfield::distance_field;
use fractform_core::{assemble_form, capacity_relaxed, Target};

fn distance(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance_field");
    group.sample_size(10);
    for res in [128, 256] {
        let (geom, grid) = koch_setup(6, res);
        group.bench_with_input(BenchmarkId::new("koch", res), &res, |b, _| b.iter(|| distance_field(&geom, &grid)));
        let (geom, grid) = cantor_setup(5, res);
        group.bench_with_input(BenchmarkId::new("cantor", res), &res, |b, _| b.iter(|| distance_field(&geom, &grid)));
    }
    group.finish();
}

fn assemble(c: &mut Criterion) {
    let df = koch_field(256);
    c.bench_function("assemble_form/koch/256", |b| b.iter(|| assemble_form(&df, 0.5).unwrap()));
}

fn capacity(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity_relaxed");
    group.sample_size(10);
    let df = koch_field(128);
    let target = Target::whole(&df);
    let eps = 8.0 * df.spacing();
    for delta in [0.5, 2.0] {
        let form = assemble_form(&df, delta).unwrap();
        group.bench_with_input(BenchmarkId::new("koch128", delta), &delta, |b, _| {
            b.iter(|| capacity_relaxed(&form, &target, eps, 1e-8).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, distance, assemble, capacity);
criterion_main!(kernels);
