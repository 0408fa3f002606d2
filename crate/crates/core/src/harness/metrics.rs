use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::stub::{build_post_stub, build_pre_stub, StubCheck};
use super::{run_checks, HarnessBackend, HarnessError};
use crate::jml::{Contract, Verdict};
use crate::testkit::{build_mutant_pool, MutantPool, MutationConfig, PoolWarning, TestSuite, Value};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Score of one metric with its per-item verdicts in item order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOutcome {
    pub score: f64,
    pub verdicts: Vec<Verdict>,
    pub elapsed: Vec<Duration>,
    pub eval_errors: usize,
}

impl MetricOutcome {
    fn from_checks(checks: Vec<(Verdict, Duration)>, counts: impl Fn(&Verdict) -> bool) -> MetricOutcome {
        let hits = checks.iter().filter(|(v, _)| counts(v)).count();
        let eval_errors = checks.iter().filter(|(v, _)| v.is_error()).count();
        let score = hits as f64 / checks.len() as f64;
        let (verdicts, elapsed) = checks.into_iter().unzip();
        MetricOutcome { score, verdicts, elapsed, eval_errors }
    }
}

fn renders(backend: &HarnessBackend) -> bool {
    matches!(backend, HarnessBackend::OpenJml(_))
}

/// Fraction of valid pairs on which the postcondition holds.
pub fn post_correctness(contract: &Contract, suite: &TestSuite, backend: &HarnessBackend) -> Result<MetricOutcome, HarnessError> {
    if suite.valid_pairs.is_empty() {
        return Err(HarnessError::EmptySuite);
    }
    let stubs = suite
        .valid_pairs
        .iter()
        .map(|p| build_post_stub(&suite.signature, contract, &p.inputs, &p.output, renders(backend)))
        .collect::<Result<Vec<StubCheck>, _>>()?;
    Ok(MetricOutcome::from_checks(run_checks(&stubs, backend)?, Verdict::is_holds))
}

/// Fraction of output mutants the postcondition rejects. Returns the pool
/// the score was computed over.
pub fn post_completeness(
    contract: &Contract,
    suite: &TestSuite,
    cfg: &MutationConfig,
    backend: &HarnessBackend,
) -> Result<(MetricOutcome, MutantPool), HarnessError> {
    if suite.valid_pairs.is_empty() {
        return Err(HarnessError::EmptySuite);
    }
    let pool = build_mutant_pool(suite, cfg)?;
    if pool.mutants.is_empty() {
        return Err(HarnessError::EmptyMutantPool);
    }
    let stubs = pool
        .mutants
        .iter()
        .map(|m| build_post_stub(&suite.signature, contract, &m.inputs, &m.mutant, renders(backend)))
        .collect::<Result<Vec<StubCheck>, _>>()?;
    Ok((MetricOutcome::from_checks(run_checks(&stubs, backend)?, Verdict::is_violated), pool))
}

/// Fraction of distinct valid inputs the precondition admits.
pub fn pre_correctness(contract: &Contract, suite: &TestSuite, backend: &HarnessBackend) -> Result<MetricOutcome, HarnessError> {
    let inputs = suite.valid_inputs();
    if inputs.is_empty() {
        return Err(HarnessError::EmptySuite);
    }
    pre_checks(contract, suite, &inputs, backend, Verdict::is_holds)
}

/// Fraction of invalid inputs the precondition rejects.
pub fn pre_completeness(contract: &Contract, suite: &TestSuite, backend: &HarnessBackend) -> Result<MetricOutcome, HarnessError> {
    if suite.invalid_inputs.is_empty() {
        return Err(HarnessError::EmptyInvalidSet);
    }
    pre_checks(contract, suite, &suite.invalid_inputs, backend, Verdict::is_violated)
}

fn pre_checks(
    contract: &Contract,
    suite: &TestSuite,
    inputs: &[Vec<Value>],
    backend: &HarnessBackend,
    counts: fn(&Verdict) -> bool,
) -> Result<MetricOutcome, HarnessError> {
    let stubs = inputs
        .iter()
        .map(|i| build_pre_stub(&suite.signature, contract, i, renders(backend)))
        .collect::<Result<Vec<StubCheck>, _>>()?;
    Ok(MetricOutcome::from_checks(run_checks(&stubs, backend)?, counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Thresholds {
    pub post_corr: f64,
    pub post_comp: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { post_corr: 0.5, post_comp: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarnessOptions {
    pub mutation: MutationConfig,
    pub thresholds: Thresholds,
    /// Record per-check wall clock in the report.
    pub timings: bool,
    /// Evaluate only the first `n` valid pairs.
    pub max_pairs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Scores {
    pub post_corr: f64,
    pub post_comp: f64,
    pub pre_corr: f64,
    /// `None` when the suite has no invalid inputs.
    pub pre_comp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PoolSizes {
    pub pairs: usize,
    pub mutants: usize,
    /// Mutants the postcondition rejected.
    pub rejected_mutants: usize,
    /// Distinct valid inputs.
    pub valid_inputs: usize,
    pub invalid_inputs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalErrorCounts {
    pub post_corr: usize,
    pub post_comp: usize,
    pub pre_corr: usize,
    pub pre_comp: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckItem {
    pub inputs: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<Value>,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MutantItem {
    pub pair_index: usize,
    pub inputs: Vec<Value>,
    pub original: Value,
    pub mutant: Value,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

/// All four metrics for one contract and suite. Field order is the JSON key
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HarnessReport {
    pub schema_version: u32,
    pub backend: String,
    pub thresholds: Thresholds,
    pub scores: Scores,
    pub meaningfully_verified: bool,
    pub pool_sizes: PoolSizes,
    pub eval_errors: EvalErrorCounts,
    pub mutation_config: MutationConfig,
    pub contract: Contract,
    pub pair_verdicts: Vec<CheckItem>,
    pub mutant_verdicts: Vec<MutantItem>,
    pub pre_verdicts: Vec<CheckItem>,
    pub invalid_verdicts: Vec<CheckItem>,
    pub warnings: Vec<PoolWarning>,
}

impl HarnessReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<HarnessReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The four scores as `name: value` lines with four decimals.
    pub fn score_lines(&self) -> String {
        let f = |x: f64| format!("{x:.4}");
        format!(
            "postCorr: {}\npostComp: {}\npreCorr: {}\npreComp: {}\n",
            f(self.scores.post_corr),
            f(self.scores.post_comp),
            f(self.scores.pre_corr),
            self.scores.pre_comp.map(f).unwrap_or_else(|| "n/a".into()),
        )
    }
}

/// Both post metrics clear their thresholds; boundaries count as passing.
pub fn meaningfully_verified(scores: &Scores, thresholds: &Thresholds) -> bool {
    scores.post_corr >= thresholds.post_corr && scores.post_comp >= thresholds.post_comp
}

fn millis(d: Duration, on: bool) -> Option<f64> {
    on.then(|| (d.as_secs_f64() * 1e6).round() / 1e3)
}

pub fn spec_harness_report(
    contract: &Contract,
    suite: &TestSuite,
    opts: &HarnessOptions,
    backend: &HarnessBackend,
) -> Result<HarnessReport, HarnessError> {
    suite.validate()?;
    let suite = match opts.max_pairs {
        Some(n) => suite.truncated(n),
        None => suite.clone(),
    };
    let timed = opts.timings;
    let post_corr = post_correctness(contract, &suite, backend)?;
    let (post_comp, pool) = post_completeness(contract, &suite, &opts.mutation, backend)?;
    let pre_corr = pre_correctness(contract, &suite, backend)?;
    let pre_comp = match pre_completeness(contract, &suite, backend) {
        Ok(m) => Some(m),
        Err(HarnessError::EmptyInvalidSet) => None,
        Err(e) => return Err(e),
    };

    let scores = Scores {
        post_corr: post_corr.score,
        post_comp: post_comp.score,
        pre_corr: pre_corr.score,
        pre_comp: pre_comp.as_ref().map(|m| m.score),
    };
    let valid_inputs = suite.valid_inputs();
    let pool_sizes = PoolSizes {
        pairs: suite.valid_pairs.len(),
        mutants: pool.mutants.len(),
        rejected_mutants: post_comp.verdicts.iter().filter(|v| v.is_violated()).count(),
        valid_inputs: valid_inputs.len(),
        invalid_inputs: suite.invalid_inputs.len(),
    };
    let eval_errors = EvalErrorCounts {
        post_corr: post_corr.eval_errors,
        post_comp: post_comp.eval_errors,
        pre_corr: pre_corr.eval_errors,
        pre_comp: pre_comp.as_ref().map_or(0, |m| m.eval_errors),
    };
    let check_items = |inputs: &[Vec<Value>], m: &MetricOutcome| -> Vec<CheckItem> {
        inputs
            .iter()
            .zip(m.verdicts.iter().zip(&m.elapsed))
            .map(|(i, (v, d))| CheckItem { inputs: i.clone(), output: None, verdict: v.clone(), elapsed_ms: millis(*d, timed) })
            .collect()
    };
    let pair_verdicts = suite
        .valid_pairs
        .iter()
        .zip(post_corr.verdicts.iter().zip(&post_corr.elapsed))
        .map(|(p, (v, d))| CheckItem {
            inputs: p.inputs.clone(),
            output: Some(p.output.clone()),
            verdict: v.clone(),
            elapsed_ms: millis(*d, timed),
        })
        .collect();
    let mutant_verdicts = pool
        .mutants
        .iter()
        .zip(post_comp.verdicts.iter().zip(&post_comp.elapsed))
        .map(|(m, (v, d))| MutantItem {
            pair_index: m.pair_index,
            inputs: m.inputs.clone(),
            original: m.original.clone(),
            mutant: m.mutant.clone(),
            verdict: v.clone(),
            elapsed_ms: millis(*d, timed),
        })
        .collect();

    Ok(HarnessReport {
        schema_version: REPORT_SCHEMA_VERSION,
        backend: backend.identity(),
        thresholds: opts.thresholds,
        meaningfully_verified: meaningfully_verified(&scores, &opts.thresholds),
        scores,
        pool_sizes,
        eval_errors,
        mutation_config: opts.mutation.clone(),
        contract: contract.clone(),
        pair_verdicts,
        mutant_verdicts,
        pre_verdicts: check_items(&valid_inputs, &pre_corr),
        invalid_verdicts: pre_comp.as_ref().map(|m| check_items(&suite.invalid_inputs, m)).unwrap_or_default(),
        warnings: pool.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{MethodSignature, Pair, TypeTag};

    fn cc_suite(invalid: Vec<Vec<Value>>) -> TestSuite {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let pairs = [('b', 'B'), ('B', 'b'), ('!', '!'), ('0', '0'), ('|', '|')]
            .iter()
            .map(|&(i, o)| Pair::new(vec![Value::char(i)], Value::char(o)))
            .collect();
        TestSuite::new(sig, pairs, invalid)
    }

    fn cc_contract() -> Contract {
        Contract::from_clauses(&["c >= 'A' && c <= 'z'"], &["(c >= 'a' && c <= 'z') ==> (\\result >= 'A' && \\result <= 'Z')"])
            .unwrap()
    }

    fn builtin() -> HarnessBackend {
        HarnessBackend::default()
    }

    #[test]
    fn change_case_scores() {
        let suite = cc_suite(vec![]);
        let r = spec_harness_report(&cc_contract(), &suite, &HarnessOptions::default(), &builtin()).unwrap();
        assert_eq!(r.scores.post_corr, 1.0);
        assert_eq!(r.pool_sizes.mutants, 20);
        assert_eq!(r.pool_sizes.rejected_mutants, 1);
        assert_eq!(r.scores.post_comp, 0.05);
        assert_eq!(r.scores.pre_corr, 0.4);
        assert_eq!(r.scores.pre_comp, None);
        assert!(!r.meaningfully_verified);
        assert!(r.pair_verdicts.iter().all(|i| i.elapsed_ms.is_none()));
    }

    #[test]
    fn vacuous_contract_duality() {
        let suite = cc_suite(vec![vec![Value::char('\u{7f}')]]);
        let r = spec_harness_report(&Contract::vacuous(), &suite, &HarnessOptions::default(), &builtin()).unwrap();
        assert_eq!(
            r.scores,
            Scores { post_corr: 1.0, post_comp: 0.0, pre_corr: 1.0, pre_comp: Some(0.0) }
        );
    }

    #[test]
    fn pinned_result_is_complete_and_wrong_constant_is_incorrect() {
        let sig = MethodSignature::new("id", &[("c", TypeTag::Int)], TypeTag::Int);
        let pairs = [0, 7, -3].iter().map(|&x| Pair::new(vec![Value::Int32(x)], Value::Int32(x))).collect();
        let suite = TestSuite::new(sig, pairs, vec![]);
        let eq = Contract::from_clauses(&[], &["\\result == c"]).unwrap();
        let (m, _) = post_completeness(&eq, &suite, &MutationConfig::default(), &builtin()).unwrap();
        assert_eq!(m.score, 1.0);
        let z = Contract::from_clauses(&[], &["\\result == 'Z'"]).unwrap();
        assert_eq!(post_correctness(&z, &cc_suite(vec![]), &builtin()).unwrap().score, 0.0);
    }

    #[test]
    fn pre_completeness_examples() {
        let sig = MethodSignature::new("f", &[("n", TypeTag::Int)], TypeTag::Int);
        let suite = TestSuite::new(sig, vec![Pair::new(vec![Value::Int32(1)], Value::Int32(1))], vec![
            vec![Value::Int32(0)],
            vec![Value::Int32(-3)],
        ]);
        let c = Contract::from_clauses(&["n > 0"], &[]).unwrap();
        assert_eq!(pre_completeness(&c, &suite, &builtin()).unwrap().score, 1.0);
        let s = MethodSignature::new("g", &[("x", TypeTag::parse("String"))], TypeTag::Int);
        let suite = TestSuite::new(s, vec![Pair::new(vec![Value::Str("a".into())], Value::Int32(1))], vec![vec![Value::Null]]);
        let c = Contract::from_clauses(&["x != null"], &[]).unwrap();
        assert_eq!(pre_completeness(&c, &suite, &builtin()).unwrap().score, 1.0);
        assert_eq!(pre_completeness(&c, &cc_suite(vec![]), &builtin()), Err(HarnessError::EmptyInvalidSet));
    }

    #[test]
    fn eval_errors_count_against_the_contract() {
        let c = Contract::from_clauses(&["c / 0 == 1"], &["\\result / 0 == 1"]).unwrap();
        let suite = cc_suite(vec![]);
        let r = spec_harness_report(&c, &suite, &HarnessOptions::default(), &builtin()).unwrap();
        assert_eq!(r.scores.post_corr, 0.0);
        assert_eq!(r.scores.post_comp, 0.0);
        assert_eq!(r.scores.pre_corr, 0.0);
        assert_eq!(r.eval_errors, EvalErrorCounts { post_corr: 5, post_comp: 20, pre_corr: 5, pre_comp: 0 });
    }

    #[test]
    fn thresholds_are_inclusive_conjunctions() {
        let t = Thresholds::default();
        let s = |a, b| Scores { post_corr: a, post_comp: b, pre_corr: 1.0, pre_comp: None };
        assert!(!meaningfully_verified(&s(1.0, 0.0), &t));
        assert!(meaningfully_verified(&s(0.5, 0.5), &t));
        assert!(!meaningfully_verified(&s(0.49, 0.9), &t));
    }

    #[test]
    fn max_pairs_truncates_and_report_round_trips() {
        let opts = HarnessOptions { max_pairs: Some(2), timings: true, ..Default::default() };
        let r = spec_harness_report(&cc_contract(), &cc_suite(vec![]), &opts, &builtin()).unwrap();
        assert_eq!(r.pool_sizes.pairs, 2);
        assert!(r.pair_verdicts.iter().all(|i| i.elapsed_ms.is_some()));
        let back = HarnessReport::from_json_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
        let keys: Vec<_> = r.to_json_string().lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap().to_string()).collect();
        assert_eq!(keys[..5], ["schemaVersion", "backend", "thresholds", "scores", "meaningfullyVerified"]);
    }
}
