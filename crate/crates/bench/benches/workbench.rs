//! Benchmarks for the hot paths: canonicalization, equivalence search,
//! typing, and the proof-net translation.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use lm_core::equivalence::{equiv, EquivConfig, Relation};
use lm_core::gen::{gen_object, seeded, GenConfig};
use lm_core::proofnets::{mult_normal_form, translate};
use lm_core::reduction::plain_normal_form;
use lm_core::syntax::{parse, Object, Sort};
use lm_core::typing::infer;

fn corpus(n: usize, size: usize, seed: u64) -> Vec<Object> {
    let cfg = GenConfig {
        max_size: size,
        ..GenConfig::default()
    };
    let mut rng = seeded(seed);
    (0..n).map(|_| gen_object(&mut rng, &cfg)).collect()
}

fn bench_fcan(c: &mut Criterion) {
    let objs = corpus(50, 30, 1);
    c.bench_function("fcan/size30x50", |b| {
        b.iter(|| {
            for o in &objs {
                black_box(plain_normal_form(black_box(o)));
            }
        })
    });
}

fn bench_sigma_equiv(c: &mut Criterion) {
    let a = parse("(w x)[w := z]", Sort::Term).unwrap();
    let b = parse("(w[w := z]) x", Sort::Term).unwrap();
    let cfg = EquivConfig::default();
    c.bench_function("equiv/exsubs", |bch| {
        bch.iter(|| {
            black_box(equiv(black_box(&a), black_box(&b), Relation::Sigma, &cfg)).unwrap()
        })
    });
}

fn bench_typing(c: &mut Criterion) {
    let peirce = parse(r"\x. mu 'a. ['a] (x (\y. mu 'd. ['a] y))", Sort::Term).unwrap();
    c.bench_function("typeof/peirce", |b| {
        b.iter(|| black_box(infer(black_box(&peirce))).unwrap())
    });
}

fn bench_translate_mnf(c: &mut Criterion) {
    let t = parse(r"(\x. x ((\y. y) z)) (mu 'a. ['a] (\w. w))", Sort::Term).unwrap();
    c.bench_function("translate+mnf", |b| {
        b.iter(|| {
            let net = translate(black_box(&t)).unwrap();
            black_box(mult_normal_form(&net))
        })
    });
}

criterion_group!(
    benches,
    bench_fcan,
    bench_sigma_equiv,
    bench_typing,
    bench_translate_mnf
);
criterion_main!(benches);
