use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use qvir_core::correlators::{four_point_closed, four_point_jackson, two_point};
use qvir_core::fock::{ModeOperator, PartitionBasis};
use qvir_core::relations::{check_defining_relation, check_lambda_vertex_relation};
use qvir_core::voa::{structure_series, vertex};
use qvir_core::{CheckConfig, CorrelatorParams, Involution, QParams, Sign, StructureFamily};

fn params() -> QParams {
    QParams::new(0.7, 0.3).unwrap()
}

fn structure(c: &mut Criterion) {
    let p = params();
    c.bench_function("structure_series G(2,1) order 16", |b| {
        b.iter(|| structure_series(black_box(StructureFamily::G { ell: 2, k: 1 }), &p, 16).unwrap())
    });
}

fn mode_operator(c: &mut Criterion) {
    let p = params();
    let v = vertex(2, 1, &p).unwrap();
    let basis = PartitionBasis::new(8);
    c.bench_function("mode operator V(2,1) degree 8", |b| b.iter(|| ModeOperator::new(black_box(&v), &p, &basis)));
}

fn relations(c: &mut Criterion) {
    let p = params();
    let cfg = CheckConfig::new(3, 2, 1e-8);
    c.bench_function("defining relation degree 3 window 2", |b| {
        b.iter(|| check_defining_relation(black_box(&p), &cfg).unwrap())
    });
    c.bench_function("lambda-vertex relation l=2 degree 3 window 2", |b| {
        b.iter(|| check_lambda_vertex_relation(2, black_box(&p), Involution::Identity, &cfg).unwrap())
    });
}

fn correlators(c: &mut Criterion) {
    let p = QParams::new(0.5, 0.5f64.powf(0.8)).unwrap();
    let cp = CorrelatorParams::new(p, 1, 1.0, 5.0).unwrap();
    let (z, w) = (Complex64::new(1.0, 0.0), Complex64::new(0.4, 0.0));
    c.bench_function("two-point l=2", |b| b.iter(|| two_point(2, black_box(&p), z, w).unwrap()));
    c.bench_function("U+ closed form", |b| b.iter(|| four_point_closed(Sign::Plus, z, black_box(w), &cp).unwrap()));
    c.bench_function("U+ Jackson sum", |b| b.iter(|| four_point_jackson(Sign::Plus, z, black_box(w), &cp).unwrap()));
}

criterion_group!(benches, structure, mode_operator, relations, correlators);
criterion_main!(benches);
