use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use padic_wavelets::dilation::{cyclic_dilation, is_dilation, matrix_s, quincunx};
use padic_wavelets::monna::{estimate_measure, sample_r, DigitSystem};
use padic_wavelets::padic::rational::rat;
use padic_wavelets::spectral::fourier;
use padic_wavelets::suite::sample::random_function;
use padic_wavelets::wavelet::orthonormality_suite;
use padic_wavelets::{DeformedMetric, WaveletIndex, WaveletSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn inner_products(c: &mut Criterion) {
    let sys = WaveletSystem::new(2, quincunx()).unwrap();
    let q = DeformedMetric::metric_q(rat(1, 2)).unwrap();
    let zero = vec![rat(0, 1); 2];
    let a = sys.wavelet(&WaveletIndex { k: vec![0, 1], j: -2, n: zero.clone() }).unwrap();
    let b = sys.wavelet(&WaveletIndex { k: vec![0, 1], j: 2, n: zero }).unwrap();
    c.bench_function("inner product across scales", |bench| bench.iter(|| a.inner_product(&b).unwrap()));
    c.bench_function("orthonormality Q J=1 L=1", |bench| bench.iter(|| orthonormality_suite(&sys, &q, 1, 1).unwrap()));
}

fn fourier_transforms(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    c.bench_function("fourier p=3 d=2 levels (1,2)", |bench| {
        bench.iter_batched(|| random_function(&mut rng, 3, 2, 1, 2), |f| fourier(&f).unwrap(), BatchSize::SmallInput)
    });
    let sys = WaveletSystem::new(3, cyclic_dilation(3, 2)).unwrap();
    let psi = sys.mother_wavelet(&sys.enumerate_k()[0]).unwrap();
    c.bench_function("fourier cyclic(3,2) mother", |bench| bench.iter(|| fourier(&psi).unwrap()));
}

fn dilations(c: &mut Criterion) {
    let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
    let flag = DeformedMetric::complete_flag(2, 3).unwrap();
    let cyc = cyclic_dilation(2, 3);
    c.bench_function("is_dilation S", |bench| bench.iter(|| is_dilation(&matrix_s(), &s).unwrap()));
    c.bench_function("is_dilation Q (rejected)", |bench| bench.iter(|| is_dilation(&quincunx(), &s).unwrap()));
    c.bench_function("is_dilation cyclic(2,3)", |bench| bench.iter(|| is_dilation(&cyc, &flag).unwrap()));
}

fn tiles(c: &mut Criterion) {
    let q = DigitSystem::standard(2, quincunx()).unwrap();
    let mut group = c.benchmark_group("tile");
    group.sample_size(10);
    group.bench_function("sample_r quincunx T=16", |bench| bench.iter(|| sample_r(&q, 16).unwrap()));
    let pts = sample_r(&q, 16).unwrap();
    group.bench_function("estimate_measure T=16 m=5", |bench| bench.iter(|| estimate_measure(&pts, &q, 5).unwrap()));
    group.finish();
}

criterion_group!(benches, inner_products, fourier_transforms, dilations, tiles);
criterion_main!(benches);
