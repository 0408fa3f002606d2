use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use veriact_bench::{change_case, linear_search, CHANGE_CASE, LINEAR_SEARCH};
use veriact_core::harness::{spec_harness_report, HarnessBackend, HarnessOptions};
use veriact_core::jml::{evaluate, extract_contract, parse_expression, Env, EvalOptions};
use veriact_core::testkit::{build_mutant_pool, mutate_output, MutationConfig, Value};

fn parsing(c: &mut Criterion) {
    let clause = "(\\result == -1 && (\\forall int i; 0 <= i && i < a.length; a[i] != key)) || (0 <= \\result && \\result < a.length && a[\\result] == key)";
    c.bench_function("parse/clause", |b| b.iter(|| parse_expression(black_box(clause)).unwrap()));
    c.bench_function("parse/extract_change_case", |b| b.iter(|| extract_contract(black_box(CHANGE_CASE), "changeCase").unwrap()));
    c.bench_function("parse/extract_linear_search", |b| b.iter(|| extract_contract(black_box(LINEAR_SEARCH), "linearSearch").unwrap()));
}

fn evaluation(c: &mut Criterion) {
    let (contract, _) = linear_search(1, 1);
    let post = contract.postcondition();
    let opts = EvalOptions::default();
    let mut group = c.benchmark_group("evaluate/linear_search_post");
    for len in [16usize, 256, 4096] {
        let items: Vec<i32> = (0..len as i32).collect();
        let env = Env::harness([("a".to_string(), Value::int_array(&items)), ("key".to_string(), Value::Int32(-1))], Some(Value::Int32(-1)));
        group.bench_with_input(BenchmarkId::from_parameter(len), &env, |b, env| b.iter(|| evaluate(&post, black_box(env), &opts)));
    }
    group.finish();
}

fn mutation(c: &mut Criterion) {
    let cfg = MutationConfig::default();
    c.bench_function("mutate/int", |b| b.iter(|| mutate_output(black_box(&Value::Int32(5)), &cfg).unwrap()));
    let arr = Value::int_array(&(0..64).collect::<Vec<_>>());
    c.bench_function("mutate/int_array_64", |b| b.iter(|| mutate_output(black_box(&arr), &cfg).unwrap()));
    let (_, suite) = linear_search(100, 32);
    c.bench_function("mutate/pool_100_pairs", |b| b.iter(|| build_mutant_pool(black_box(&suite), &cfg).unwrap()));
}

fn harness_report(c: &mut Criterion) {
    let backend = HarnessBackend::default();
    let opts = HarnessOptions::default();
    let (contract, suite) = change_case();
    c.bench_function("harness/change_case", |b| b.iter(|| spec_harness_report(&contract, black_box(&suite), &opts, &backend).unwrap()));
    let mut group = c.benchmark_group("harness/linear_search");
    group.sample_size(20);
    for pairs in [10usize, 100] {
        let (contract, suite) = linear_search(pairs, 32);
        group.bench_with_input(BenchmarkId::from_parameter(pairs), &suite, |b, suite| {
            b.iter(|| spec_harness_report(&contract, suite, &opts, &backend).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, parsing, evaluation, mutation, harness_report);
criterion_main!(benches);
