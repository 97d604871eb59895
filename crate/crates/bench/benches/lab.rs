use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use kakeya_core::geometry::enum_kplanes;
use kakeya_core::gf::{FieldElement, FieldSpec};
use kakeya_core::maximal::{kakeya_maximal, PointFunction};
use kakeya_core::polymethod::{build_small_kakeya, dvir_check};
use kakeya_core::rings::{greedy_ring_kakeya, ring_kakeya_check, RingSpec};
use kakeya_core::rng::trial_rng;
use kakeya_core::Caps;

fn bench_field_arithmetic(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_mul");
    for (label, field) in [
        ("F_257", FieldSpec::new(257, 1, None).unwrap()),
        ("F_2^8", FieldSpec::new(2, 8, None).unwrap()),
        ("F_2^20_untabled", FieldSpec::new(2, 20, None).unwrap()),
    ] {
        let q = field.q();
        group.bench_function(label, |b| {
            let mut i = 1u64;
            b.iter(|| {
                i = i % (q - 1) + 1;
                let a = field.element(i);
                let x = field.element(q - i);
                black_box(field.mul(a, x))
            })
        });
    }
    group.finish();
}

fn bench_kakeya_maximal(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("kakeya_maximal");
    for (n, q) in [(2usize, 7u64), (2, 13), (3, 3)] {
        let field = FieldSpec::new(q, 1, None).unwrap();
        let mut rng = trial_rng(1, 0);
        let f = PointFunction::random(&field, n, 0.5, &mut rng);
        group.bench_function(format!("n{n}_q{q}"), |b| {
            b.iter(|| black_box(kakeya_maximal(&f, &caps).unwrap()))
        });
    }
    group.finish();
}

fn bench_dvir_certificate(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("dvir_check");
    for q in [5u64, 7, 11] {
        let field = FieldSpec::new(q, 1, None).unwrap();
        let e: BTreeSet<Vec<FieldElement>> = build_small_kakeya(&field, 2, &caps).unwrap();
        group.bench_function(format!("q{q}"), |b| {
            b.iter_batched(
                || e.clone(),
                |e| black_box(dvir_check(&e, 2, &field, &caps).unwrap()),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_ring_and_grassmannian(c: &mut Criterion) {
    let caps = Caps::default();
    let field = FieldSpec::new(2, 1, None).unwrap();
    let ring = RingSpec::poly_mod_xk(field.clone(), 2).unwrap();
    let e = greedy_ring_kakeya(&ring, 2, 3, &caps).unwrap();
    c.bench_function("ring_kakeya_check_f2x2_n2", |b| {
        b.iter(|| black_box(ring_kakeya_check(&e, 2, &ring, &caps).unwrap()))
    });
    let f3 = FieldSpec::new(3, 1, None).unwrap();
    c.bench_function("enum_kplanes_f3_n4_k2", |b| {
        b.iter(|| black_box(enum_kplanes(&f3, 4, 2, false, &caps).unwrap().len()))
    });
}

criterion_group!(
    benches,
    bench_field_arithmetic,
    bench_kakeya_maximal,
    bench_dvir_certificate,
    bench_ring_and_grassmannian
);
criterion_main!(benches);
