//! Hoare-triple harness checks and the four contract-quality metrics.

mod metrics;
mod stub;

use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

pub use metrics::{
    meaningfully_verified, post_completeness, post_correctness, pre_completeness, pre_correctness, spec_harness_report,
    CheckItem, EvalErrorCounts, HarnessOptions, HarnessReport, MetricOutcome, MutantItem, PoolSizes, Scores, Thresholds,
    REPORT_SCHEMA_VERSION,
};
pub use stub::{build_post_stub, build_pre_stub, render_stub, stub_predicate, Assignment, StubCheck, StubKind, RESULT_LOCAL, STUB_CLASS};

use crate::jml::eval::{evaluate, Env, EvalErrorReason, EvalOptions, Verdict};
use crate::process::{run_with_timeout, ProcessError};
use crate::testkit::{MutationError, SuiteError};
use crate::verify::{classify_output, ErrorCategory, OpenJmlConfig, PatternTable, VerifyError};

/// Where stub predicates get decided.
#[derive(Debug, Clone)]
pub enum HarnessBackend {
    /// Concrete evaluation of the predicate.
    Builtin(EvalOptions),
    /// The external verifier checks the rendered stub's assert.
    OpenJml(OpenJmlConfig),
}

impl Default for HarnessBackend {
    fn default() -> Self {
        HarnessBackend::Builtin(EvalOptions::default())
    }
}

impl HarnessBackend {
    pub fn identity(&self) -> String {
        match self {
            HarnessBackend::Builtin(_) => "builtin".into(),
            HarnessBackend::OpenJml(cfg) => format!("openjml:{}", cfg.executable.display()),
        }
    }

    pub fn probe(&self) -> Result<(), HarnessError> {
        match self {
            HarnessBackend::Builtin(_) => Ok(()),
            HarnessBackend::OpenJml(cfg) => cfg.resolve_executable().map(|_| ()).map_err(HarnessError::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("the suite has no valid pairs")]
    EmptySuite,
    #[error("no output could be mutated")]
    EmptyMutantPool,
    #[error("the suite lists no invalid inputs")]
    EmptyInvalidSet,
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error("harness backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("{0}")]
    Io(String),
}

impl From<VerifyError> for HarnessError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::BackendUnavailable(m) => HarnessError::BackendUnavailable(m),
            other => HarnessError::Io(other.to_string()),
        }
    }
}

/// Decides one stub.
pub fn check_stub(stub: &StubCheck, backend: &HarnessBackend) -> Result<Verdict, HarnessError> {
    match backend {
        HarnessBackend::Builtin(opts) => {
            let env = Env::harness(stub.params(), stub.result().cloned());
            Ok(evaluate(&stub.predicate, &env, opts))
        }
        HarnessBackend::OpenJml(cfg) => check_with_openjml(stub, cfg),
    }
}

fn check_with_openjml(stub: &StubCheck, cfg: &OpenJmlConfig) -> Result<Verdict, HarnessError> {
    let exe = cfg.resolve_executable()?;
    let source = stub.rendered_source.clone().unwrap_or_else(|| render_stub(stub));
    let dir = tempfile::tempdir().map_err(|e| HarnessError::Io(e.to_string()))?;
    let file = format!("{STUB_CLASS}.java");
    std::fs::write(dir.path().join(&file), source).map_err(|e| HarnessError::Io(e.to_string()))?;
    let at = stub_predicate(&stub.predicate).to_string();
    let mut cmd = Command::new(exe);
    cmd.current_dir(dir.path()).args(&cfg.mode_flags).args(&cfg.extra_flags).arg(&file);
    let out = match run_with_timeout(&mut cmd, cfg.timeout()) {
        Ok(out) => out,
        Err(ProcessError::Timeout { .. }) => return Ok(Verdict::EvalError { reason: EvalErrorReason::BackendTimeout, at }),
        Err(e @ ProcessError::Spawn { .. }) => return Err(HarnessError::BackendUnavailable(e.to_string())),
        Err(_) => return Ok(Verdict::EvalError { reason: EvalErrorReason::BackendFailure, at }),
    };
    let (es, ev) = classify_output(&out.combined(), out.code, &PatternTable::builtin());
    Ok(if !es.is_empty() {
        Verdict::EvalError { reason: EvalErrorReason::BackendFailure, at }
    } else if ev.iter().any(|e| e.category == ErrorCategory::AssertNotProven) {
        Verdict::Violated
    } else if ev.is_empty() && out.success() {
        Verdict::Holds
    } else {
        Verdict::EvalError { reason: EvalErrorReason::BackendFailure, at }
    })
}

/// Verdicts for `stubs` in order, with per-check wall clock. Builtin checks
/// run on the rayon pool; external checks on a pool sized by the verifier's
/// parallelism limit.
pub fn run_checks(stubs: &[StubCheck], backend: &HarnessBackend) -> Result<Vec<(Verdict, Duration)>, HarnessError> {
    let one = |s: &StubCheck| {
        let start = Instant::now();
        check_stub(s, backend).map(|v| (v, start.elapsed()))
    };
    match backend {
        HarnessBackend::Builtin(_) => stubs.par_iter().map(one).collect(),
        HarnessBackend::OpenJml(cfg) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallelism.max(1))
                .build()
                .map_err(|e| HarnessError::Io(e.to_string()))?;
            pool.install(|| stubs.par_iter().map(one).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jml::Contract;
    use crate::testkit::{MethodSignature, TypeTag, Value};

    #[test]
    fn builtin_checks_follow_the_evaluator() {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let contract = Contract::from_clauses(&[], &["(c >= 'a' && c <= 'z') ==> (\\result >= 'A' && \\result <= 'Z')"]).unwrap();
        let b = HarnessBackend::default();
        let check = |o: char| {
            let s = build_post_stub(&sig, &contract, &[Value::char('b')], &Value::char(o), false).unwrap();
            check_stub(&s, &b).unwrap()
        };
        assert_eq!(check('B'), Verdict::Holds);
        assert_eq!(check('5'), Verdict::Violated);
        let t = build_post_stub(&sig, &Contract::vacuous(), &[Value::char('q')], &Value::char('%'), false).unwrap();
        assert_eq!(check_stub(&t, &b).unwrap(), Verdict::Holds);
    }

    #[test]
    fn missing_verifier_is_unavailable() {
        if std::env::var_os(crate::verify::OPENJML_ENV).is_some() {
            return;
        }
        let b = HarnessBackend::OpenJml(OpenJmlConfig { executable: "/nonexistent/openjml".into(), ..Default::default() });
        assert!(matches!(b.probe(), Err(HarnessError::BackendUnavailable(_))));
    }
}
