use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::{Matrix3, Vector3};

use qreduce::covariant::{generator_triple, CovariantTriple, Example4};
use qreduce::{GkslParams, QubitChannel, C64};

fn channel_tests(c: &mut Criterion) {
    let map = QubitChannel::new(Matrix3::new(0.6, 0.1, -0.2, 0.05, 0.5, 0.1, 0.2, 0.0, 0.4), Vector3::new(0.1, 0.0, -0.2));
    c.bench_function("positivity", |b| b.iter(|| black_box(&map).is_positive(0.0)));
    c.bench_function("complete_positivity", |b| b.iter(|| black_box(&map).is_completely_positive(0.0)));
    c.bench_function("compose", |b| b.iter(|| black_box(&map).compose(black_box(&map))));
}

fn generator_margins(c: &mut Criterion) {
    let k = Matrix3::new(0.5, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2).map(C64::from);
    let unital = GkslParams::new(Vector3::new(0.0, 0.0, 1.0), k);
    let mut shifted = k;
    shifted[(0, 1)] += C64::new(0.0, 0.08);
    shifted[(1, 0)] -= C64::new(0.0, 0.08);
    let affine = GkslParams::new(Vector3::new(0.0, 0.0, 1.0), shifted);
    c.bench_function("p_div_margin_unital", |b| b.iter(|| black_box(&unital).p_div_margin()));
    c.bench_function("p_div_margin_affine", |b| b.iter(|| black_box(&affine).p_div_margin()));
    c.bench_function("cp_div_margin", |b| b.iter(|| black_box(&affine).cp_div_margin()));
}

fn covariant(c: &mut Criterion) {
    let p = CovariantTriple::new(0.8, 0.6, C64::new(0.3, 0.2), C64::from_polar(0.2, PI / 3.0));
    c.bench_function("triple_compose_symbolic", |b| b.iter(|| black_box(&p).compose_symbolic(black_box(&p))));
    c.bench_function("triple_compose_operator", |b| b.iter(|| black_box(&p).compose(black_box(&p))));
    let ex = Example4::new(1.64);
    c.bench_function("generator_triple", |b| b.iter(|| generator_triple(&ex, black_box(0.7))));
}

criterion_group!(benches, channel_tests, generator_margins, covariant);
criterion_main!(benches);
