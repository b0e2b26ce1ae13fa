use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use expdio_bench::{regime_prime, PAIRS, PROPERTY_SAMPLES, SIEVE_WINDOW, SIEVE_YS, SPLIT_PRIMES};
use expdio_core::cf_sieve::range::{sieve_range, RangeOptions};
use expdio_core::cf_sieve::sieve_y;
use expdio_core::hypergeom::{build_pair, check_properties, uniqueness_decision, ZSamples};
use expdio_core::linf::first_upper_bound;
use expdio_core::pipeline::{decide_q, DecideOptions};
use expdio_core::solutions::{family_search, N_UPPER};
use expdio_core::split_poly::{default_digits, split_f, verify_identities};
use expdio_core::thue::case_table;

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    for y in SIEVE_YS {
        g.bench_with_input(BenchmarkId::new("sieve_y", y), &y, |b, &y| {
            b.iter(|| sieve_y(black_box(y), N_UPPER as u64).unwrap())
        });
    }
    g.sample_size(10);
    g.bench_function("window", |b| {
        let mut o = RangeOptions::new(SIEVE_WINDOW.0, SIEVE_WINDOW.1, N_UPPER as u64);
        o.workers = 1;
        b.iter(|| sieve_range(black_box(&o)).unwrap())
    });
    g.finish();
}

fn hypergeom(c: &mut Criterion) {
    let mut g = c.benchmark_group("hypergeom");
    let samples = ZSamples::grid(PROPERTY_SAMPLES);
    for (n1, n2) in PAIRS {
        let id = format!("{n1}-{n2}");
        g.bench_with_input(BenchmarkId::new("build_pair", &id), &(n1, n2), |b, &(n1, n2)| {
            b.iter(|| build_pair(black_box(n1), black_box(n2)).unwrap())
        });
        let pair = build_pair(n1, n2).unwrap();
        g.bench_with_input(BenchmarkId::new("check_properties", &id), &pair, |b, p| {
            b.iter(|| check_properties(black_box(p), &samples).unwrap())
        });
    }
    g.sample_size(10);
    let q = regime_prime();
    g.bench_function("uniqueness_decision", |b| {
        b.iter(|| uniqueness_decision(black_box(&q)).unwrap())
    });
    g.finish();
}

fn split(c: &mut Criterion) {
    let mut g = c.benchmark_group("split_poly");
    g.sample_size(10);
    for p in SPLIT_PRIMES {
        g.bench_with_input(BenchmarkId::new("split_and_verify", p), &p, |b, &p| {
            b.iter(|| verify_identities(&split_f(black_box(p), default_digits(p)).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    g.bench_function("family_search_100", |b| b.iter(|| family_search(black_box(100))));
    g.bench_function("case_table_13", |b| b.iter(|| case_table(black_box(13)).unwrap()));
    g.bench_function("first_upper_bound_11", |b| {
        b.iter(|| first_upper_bound(&BigInt::from(11)).unwrap())
    });
    g.bench_function("decide_1801", |b| {
        b.iter(|| decide_q(&BigInt::from(black_box(1801)), &DecideOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, sieve, hypergeom, split, pipeline);
criterion_main!(benches);
