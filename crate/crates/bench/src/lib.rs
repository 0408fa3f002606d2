//! Workloads shared by the benchmarks in `benches/`.

use veriact_core::jml::{extract_contract, Contract};
use veriact_core::testkit::{MethodSignature, Pair, TestSuite, TypeTag, Value};

pub const CHANGE_CASE: &str = include_str!("../../core/tests/fixtures/changecase/ChangeCase.java");
pub const CHANGE_CASE_SUITE: &str = include_str!("../../core/tests/fixtures/changecase/cc.suite.json");
pub const LINEAR_SEARCH: &str = include_str!("../../core/tests/fixtures/minibench/linear_search.java");

pub fn change_case() -> (Contract, TestSuite) {
    let contract = extract_contract(CHANGE_CASE, "changeCase").expect("fixture contract").contract;
    (contract, TestSuite::from_json_str(CHANGE_CASE_SUITE).expect("fixture suite"))
}

/// `pairs` searches over arrays of `len` elements; every third key is absent.
pub fn linear_search(pairs: usize, len: usize) -> (Contract, TestSuite) {
    let contract = extract_contract(LINEAR_SEARCH, "linearSearch").expect("fixture contract").contract;
    let sig = MethodSignature::new("linearSearch", &[("a", TypeTag::parse("int[]")), ("key", TypeTag::Int)], TypeTag::Int);
    let valid = (0..pairs)
        .map(|p| {
            let items: Vec<i32> = (0..len as i32).map(|i| i * 3 + p as i32).collect();
            let key = if p % 3 == 0 { -1 } else { items[(p * 7) % len] };
            let found = items.iter().position(|&x| x == key).map_or(-1, |i| i as i32);
            Pair::new(vec![Value::int_array(&items), Value::Int32(key)], Value::Int32(found))
        })
        .collect();
    (contract, TestSuite::new(sig, valid, vec![]))
}
