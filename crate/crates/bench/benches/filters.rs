use criterion::{criterion_group, criterion_main, Criterion};
use nomf_core::filters::{median_filter_overlap, nomf, KernelSpec};
use nomf_core::BinaryFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn frame() -> BinaryFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    BinaryFrame::from_fn(240, 180, |_, _| rng.random_bool(0.1))
}

fn software_filters(c: &mut Criterion) {
    let f = frame();
    for spec in [KernelSpec::n3(), KernelSpec::n5()] {
        c.bench_function(&format!("nomf_240x180_n{}", spec.n()), |b| b.iter(|| nomf(black_box(&f), spec)));
        c.bench_function(&format!("overlap_240x180_n{}", spec.n()), |b| {
            b.iter(|| median_filter_overlap(black_box(&f), spec))
        });
    }
}

criterion_group!(benches, software_filters);
criterion_main!(benches);
