//! Parallel versus single-threaded runs of the data-parallel kernels. The
//! single-threaded variant runs the same code inside a one-thread pool; a
//! build with `--no-default-features` uses the plain sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use royden_core::galerkin::{build_space, run_beurling, BeurlingConfig, CorpusEntry};
use royden_core::hardy::{locate_zeros, winding_vector, ZeroSearch};
use royden_core::laplace::{HarmonicContext, Tolerances};
use royden_core::{geometry::CircularDomain, C64};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let seq = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let par = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", seq), ("parallel", par)]
}

fn annulus() -> CircularDomain {
    CircularDomain::annulus(0.5, C64::new(0.5f64.sqrt(), 0.0)).unwrap()
}

fn bench_context(c: &mut Criterion) {
    let mut g = c.benchmark_group("harmonic_context");
    g.sample_size(10);
    let d = annulus();
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "M=256,K=96"), |b| {
            b.iter(|| pool.install(|| HarmonicContext::new(&d, 256, 96, Tolerances::default()).unwrap()))
        });
    }
    g.finish();
}

fn bench_zeros(c: &mut Criterion) {
    let mut g = c.benchmark_group("locate_zeros");
    g.sample_size(10);
    let d = annulus();
    let ctx = HarmonicContext::new(&d, 256, 96, Tolerances::default()).unwrap();
    let zs = [C64::new(0.7, 0.1), C64::new(-0.6, 0.3), C64::new(0.1, -0.8)];
    let f = move |w: C64| zs.iter().fold(C64::new(1.0, 0.0), |acc, z| acc * (w - z));
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "three zeros"), |b| {
            b.iter(|| {
                pool.install(|| {
                    let n = winding_vector(&f, ctx.sampling()).unwrap().zeros_in_domain;
                    locate_zeros(&f, ctx.sampling(), n, ZeroSearch::default()).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn bench_beurling(c: &mut Criterion) {
    let mut g = c.benchmark_group("beurling_sweep");
    g.sample_size(10);
    let d = annulus();
    let ctx = HarmonicContext::new(&d, 256, 96, Tolerances::default()).unwrap();
    let space = build_space(&ctx, 24).unwrap();
    let corpus: Vec<CorpusEntry> = (0..6)
        .map(|k| CorpusEntry {
            label: format!("w^{k}*(w-2)"),
            f: Box::new(move |w: C64| w.powi(k) * (w - 2.0)),
            inner: Some(Box::new(move |w: C64| w.powi(k))),
        })
        .collect();
    let cfg = BeurlingConfig::default();
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "6 elements, D=4,8,12"), |b| {
            b.iter(|| pool.install(|| run_beurling(&ctx, &space, &corpus, &cfg).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_context, bench_zeros, bench_beurling);
criterion_main!(benches);
