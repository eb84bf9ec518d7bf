use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use timf_core::branch::TimfModel;
use timf_core::model_bound::ModelBound;
use timf_core::model_free::ModelFree;
use timf_core::oracle::{exact_d_bound, exact_d_free};
use timf_core::params::{ModelBoundParams, ModelFreeParams};
use timf_core::quad::QuadratureSpec;
use timf_core::roots::{all_roots, linear_path, track, RootOptions, TrackOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn roots(cr: &mut Criterion) {
    let m = ModelBound::reference().unwrap();
    let p = m.d_family(c(-0.7, 0.3));
    let opts = RootOptions::default();
    cr.bench_function("all_roots degree 7", |b| b.iter(|| all_roots(black_box(&p), &opts).unwrap()));
}

fn tracking(cr: &mut Criterion) {
    let m = ModelBound::reference().unwrap();
    let path = linear_path(c(-7.5, 0.2), c(4.0, 0.2), 400);
    let opts = TrackOptions::default();
    cr.bench_function("track D over 400 steps", |b| {
        b.iter(|| track(black_box(&path), |z| m.d_family(z), None, &opts).unwrap())
    });
}

fn elimination(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("elimination");
    g.sample_size(10);
    g.bench_function("free model", |b| b.iter(|| ModelFree::new(black_box(ModelFreeParams::unit())).unwrap()));
    g.bench_function("bound model", |b| b.iter(|| ModelBound::new(black_box(ModelBoundParams::reference())).unwrap()));
    g.finish();
}

fn oracles(cr: &mut Criterion) {
    let qs = QuadratureSpec::default();
    let pf = ModelFreeParams::unit();
    let pb = ModelBoundParams::reference();
    cr.bench_function("exact D free", |b| b.iter(|| exact_d_free(black_box(c(-1.3, 0.5)), &pf, &qs).unwrap()));
    cr.bench_function("exact D bound", |b| b.iter(|| exact_d_bound(black_box(c(-1.3, 0.5)), &pb, &qs).unwrap()));
}

criterion_group!(benches, roots, tracking, elimination, oracles);
criterion_main!(benches);
