use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use valdef::fol::{self, EvalMode};
use valdef::katocheck::{self, Scheme};
use valdef::recipe;
use valdef::Field;

fn sentence_eval(c: &mut Criterion) {
    let phi = recipe::emit_phi_d(0);
    let none = BTreeMap::new();
    let mut group = c.benchmark_group("phi_d_eval");
    group.sample_size(10);
    for q in [5u64, 7] {
        let k = Field::finite(q).unwrap();
        for (name, mode) in [("sequential", EvalMode::Sequential), ("parallel", EvalMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, q), &k, |b, k| {
                b.iter(|| fol::eval_sentence_with(&phi, k, &none, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn kato_complex(c: &mut Criterion) {
    let mut group = c.benchmark_group("kato_check_complex");
    group.sample_size(10);
    for q in [5u64, 9] {
        let inst = katocheck::build_kc(Scheme::P1OverFq(q)).unwrap();
        let samples = katocheck::random_symbols(&inst, 300, 1);
        for (name, parallel) in [("sequential", false), ("parallel", true)] {
            group.bench_with_input(BenchmarkId::new(name, q), &samples, |b, s| {
                b.iter(|| katocheck::check_complex(&inst, s, parallel).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sentence_eval, kato_complex);
criterion_main!(benches);
