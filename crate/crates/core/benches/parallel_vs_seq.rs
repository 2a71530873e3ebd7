//! Sequential vs. data-parallel timings for the five paired entry points:
//! the (D)/(D_w) pair scans, isometry verification over ball-vertex tuples,
//! full decomposition, and the star-property falsifier.
//!
//! Run with `cargo bench -p tset-core`. The parallel variants schedule on
//! rayon's global pool, so the observed ratio depends on the cores the host
//! grants; on a single core the two columns measure the same work plus
//! scheduling overhead. Both variants return identical values by
//! construction (deterministic reductions), which the test suite asserts
//! separately — these benches only measure.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use tset_core::decompose::{decompose_par, decompose_seq};
use tset_core::fixtures::{cube_bipyramid, identity_op, polygon, wc_random};
use tset_core::operator::{verify_isometry_par, verify_isometry_seq};
use tset_core::stnorm::{st_falsify_par, st_falsify_seq};
use tset_core::tsets::{
    has_property_d_par, has_property_d_seq, has_property_dw_par, has_property_dw_seq,
};

fn property_scans(c: &mut Criterion) {
    let space = polygon(24);

    let mut g = c.benchmark_group("property_d/polygon_24");
    g.bench_function("seq", |b| b.iter(|| black_box(has_property_d_seq(&space))));
    g.bench_function("par", |b| b.iter(|| black_box(has_property_d_par(&space))));
    g.finish();

    let mut g = c.benchmark_group("property_dw/polygon_24");
    g.bench_function("seq", |b| b.iter(|| black_box(has_property_dw_seq(&space))));
    g.bench_function("par", |b| b.iter(|| black_box(has_property_dw_par(&space))));
    g.finish();
}

fn isometry_verification(c: &mut Criterion) {
    // Three points over the 3-dimensional bipyramid: 10^3 vertex tuples,
    // the largest stock instance.
    let op = wc_random(&["a", "b", "c"], cube_bipyramid(), 0);

    let mut g = c.benchmark_group("verify_isometry/bipyramid_x3");
    g.sample_size(10).measurement_time(Duration::from_secs(8));
    g.bench_function("seq", |b| b.iter(|| black_box(verify_isometry_seq(&op))));
    g.bench_function("par", |b| b.iter(|| black_box(verify_isometry_par(&op))));
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    // Decomposition re-verifies the isometry internally, so a two-point
    // instance keeps a single iteration moderate.
    let op = wc_random(&["a", "b"], cube_bipyramid(), 0);

    let mut g = c.benchmark_group("decompose/bipyramid_x2");
    g.sample_size(10).measurement_time(Duration::from_secs(8));
    g.bench_function("seq", |b| b.iter(|| black_box(decompose_seq(&op))));
    g.bench_function("par", |b| b.iter(|| black_box(decompose_par(&op))));
    g.finish();
}

fn star_falsifier(c: &mut Criterion) {
    let op = identity_op();

    let mut g = c.benchmark_group("st_falsify/identity_256");
    g.bench_function("seq", |b| b.iter(|| black_box(st_falsify_seq(&op, 256, 0))));
    g.bench_function("par", |b| b.iter(|| black_box(st_falsify_par(&op, 256, 0))));
    g.finish();
}

criterion_group!(
    benches,
    property_scans,
    isometry_verification,
    decomposition,
    star_falsifier
);
criterion_main!(benches);
