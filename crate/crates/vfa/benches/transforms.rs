//! Transform benchmarks. The hot loops are data-parallel over bands and
//! vertices; run `cargo bench` for the rayon build and
//! `cargo bench --no-default-features` for the sequential fallback —
//! criterion diffs the two under the same benchmark names.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vfa::energy::{rid, RidKernel};
use vfa::graph::{Graph, SwissRollParams};
use vfa::inversion::tune_threshold;
use vfa::lgft::{lgft_bank, lgft_bank_polynomial};
use vfa::signal::{add_noise_at_snr, random_signal};
use vfa::spectral::{decompose, BasisKind, SpectralBasis};
use vfa::wavelet::{wavelet_transform, WaveletMode};
use vfa::windows::raised_cosine_bank;

struct Fixture {
    graph: Graph,
    basis: SpectralBasis,
    signal: ndarray::Array1<f64>,
}

fn fixture(n: usize) -> Fixture {
    let graph = Graph::swiss_roll(&SwissRollParams::new(n, 100.0, 7, 15)).unwrap();
    let basis = decompose(&graph, BasisKind::Laplacian).unwrap();
    let signal = random_signal(n, 42);
    Fixture { graph, basis, signal }
}

fn bench_lgft_bank(c: &mut Criterion) {
    let mut group = c.benchmark_group("lgft_bank_spectral");
    for n in [100usize, 300] {
        let f = fixture(n);
        let bank = raised_cosine_bank(15, &f.basis, false).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| lgft_bank(black_box(&f.signal), &bank, &f.basis).unwrap())
        });
    }
    group.finish();
}

fn bench_lgft_bank_polynomial(c: &mut Criterion) {
    let mut group = c.benchmark_group("lgft_bank_polynomial_m40");
    for n in [100usize, 300] {
        let f = fixture(n);
        let bank = raised_cosine_bank(15, &f.basis, true).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| lgft_bank_polynomial(black_box(&f.signal), &bank, &f.graph, 40).unwrap())
        });
    }
    group.finish();
}

fn bench_rid_sinc(c: &mut Criterion) {
    let mut group = c.benchmark_group("rid_sinc");
    for n in [100usize, 200] {
        let f = fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| rid(black_box(&f.signal), &f.basis, &RidKernel::Sinc).unwrap())
        });
    }
    group.finish();
}

fn bench_wavelet(c: &mut Criterion) {
    let f = fixture(100);
    c.bench_function("wavelet_spectral_k9", |b| {
        b.iter(|| {
            wavelet_transform(black_box(&f.signal), &f.graph, &f.basis, 2.0, 9, WaveletMode::Spectral)
                .unwrap()
        })
    });
}

fn bench_threshold_tuning(c: &mut Criterion) {
    let f = fixture(100);
    let bank = raised_cosine_bank(25, &f.basis, false).unwrap();
    let noisy = add_noise_at_snr(&f.signal, 5.5, 7);
    c.bench_function("tune_threshold_k25_grid60", |b| {
        b.iter(|| tune_threshold(black_box(&f.signal), &noisy, &bank, &f.basis, 60).unwrap())
    });
}

criterion_group!(
    benches,
    bench_lgft_bank,
    bench_lgft_bank_polynomial,
    bench_rid_sinc,
    bench_wavelet,
    bench_threshold_tuning
);
criterion_main!(benches);
