use braidrep_core::action::{act_signed, differential, RepTuple};
use braidrep_core::braid::{BraidWord, SignVector};
use braidrep_core::fox_burau::burau;
use braidrep_core::quat::{sample_sphere, SpherePoint};
use braidrep_core::solver::{compute_h, SolverConfig};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_action(c: &mut Criterion) {
    let b = BraidWord::parse("1 -2 3 -1 2 -3 1 2 3 -2 1 2", None).unwrap();
    let eps = SignVector::canonical_for(&b).unwrap_or_else(|_| SignVector::ones(4));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = RepTuple::new((0..4).map(|_| sample_sphere(&mut rng)).collect());
    c.bench_function("act_signed_len12_n4", |bench| {
        bench.iter(|| act_signed(black_box(&eps), black_box(&b), black_box(&x)).unwrap())
    });
    c.bench_function("differential_len12_n4", |bench| {
        bench.iter(|| differential(black_box(&eps), black_box(&b), black_box(&x)).unwrap())
    });
}

fn bench_burau(c: &mut Criterion) {
    let b = BraidWord::parse("1 -2 3 -1 2 -3 1 2 3 -2", None).unwrap();
    c.bench_function("burau_len10_n4", |bench| {
        bench.iter(|| burau(black_box(&b)).eval_neg1())
    });
}

fn bench_compute_h(c: &mut Criterion) {
    let hopf = BraidWord::parse("1 1", None).unwrap();
    let x = RepTuple::new(vec![SpherePoint::J, SpherePoint::I]);
    let _ = x;
    let cfg = SolverConfig::default().with_seed(1).with_starts(100);
    let mut group = c.benchmark_group("compute_h");
    group.sample_size(10);
    group.bench_function("hopf_100_starts", |bench| {
        bench.iter(|| compute_h(black_box(&hopf), None, black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_action, bench_burau, bench_compute_h);
criterion_main!(benches);
