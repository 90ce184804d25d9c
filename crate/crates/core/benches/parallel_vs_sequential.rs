//! rayon against the plain iterator on the three data-parallel kernels:
//! coboundary assembly, sparse Gram products and walk block expansion.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qrw::coefficients::CoefficientEngine;
use qrw::el_module::{Corner, ElModule};
use qrw::exec::{Parallel, Sequential};
use qrw::gns::GnsData;
use qrw::hochschild::coboundary_matrix_with;
use qrw::models;
use qrw::toy_fock::{beta_unitary, Walk};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn engine() -> CoefficientEngine {
    let (alg, gen) = models::random_m3();
    CoefficientEngine::new(ElModule::build(&GnsData::build(&alg, &gen).unwrap()).unwrap())
}

fn coboundary(c: &mut Criterion) {
    let eng = engine();
    let mut group = c.benchmark_group("coboundary_degree2");
    group.sample_size(10);
    for corner in [Corner::C10, Corner::C11] {
        let cx = eng.complex(corner);
        group.bench_with_input(BenchmarkId::new("sequential", corner), &corner, |b, _| {
            b.iter(|| black_box(coboundary_matrix_with::<Sequential>(cx.table(), cx.module(), 2)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", corner), &corner, |b, _| {
            b.iter(|| black_box(coboundary_matrix_with::<Parallel>(cx.table(), cx.module(), 2)))
        });
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let eng = engine();
    // degree 2 of corner 10: 13122 x 1458
    let d = eng.complex(Corner::C10).coboundary_matrix(2).unwrap().clone();
    let mut group = c.benchmark_group("sparse_gram");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(d.gram::<Sequential>())));
    group.bench_function("parallel", |b| b.iter(|| black_box(d.gram::<Parallel>())));
    group.finish();
}

fn walk(c: &mut Criterion) {
    let (alg, gen) = models::amplitude_damping();
    let beta = beta_unitary(&alg, &gen, 0.05).unwrap();
    let walk = Walk::new(&alg, &beta, 1 << 13).unwrap();
    let x = alg.random_element(&mut ChaCha8Rng::seed_from_u64(1)).coeffs;
    let mut group = c.benchmark_group("walk_operator_n8");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(walk.operator_with::<Sequential>(&x, 8))));
    group.bench_function("parallel", |b| b.iter(|| black_box(walk.operator_with::<Parallel>(&x, 8))));
    group.finish();
}

criterion_group!(benches, coboundary, gram, walk);
criterion_main!(benches);
