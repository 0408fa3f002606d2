//! Suite-driven stand-in for the external verifier.
//!
//! A contract is accepted when it parses, is well-scoped and well-typed,
//! and every ensures clause holds on every suite pair whose input satisfies
//! the requires clauses. This is testing, not proof: it can accept contracts
//! a deductive verifier would reject.

use regex::Regex;

use super::openjml::java_file_name;
use super::patterns::PatternTable;
use super::{ClassifiedError, ErrorCategory, VerifierResult, VerifierStatus};
use crate::jml::contract::{extract_contract, ContractError};
use crate::jml::eval::{evaluate, Env, EvalErrorReason, EvalOptions, Verdict};
use crate::testkit::{Pair, TestSuite};

#[derive(Debug, Clone)]
pub struct BuiltinVerifier {
    pub method: String,
    pub suite: TestSuite,
    pub eval: EvalOptions,
}

impl BuiltinVerifier {
    pub fn new(method: &str, suite: TestSuite) -> BuiltinVerifier {
        BuiltinVerifier { method: method.to_string(), suite, eval: EvalOptions::default() }
    }

    pub fn verify(&self, source: &str, patterns: &PatternTable) -> VerifierResult {
        let file = java_file_name(source);
        let mut log = Vec::new();
        let mut es = Vec::new();
        let mut ev = Vec::new();
        let mut report = |category: ErrorCategory, line: Option<u32>, message: String, log: &mut Vec<String>| {
            let severity = if category.is_syntax() { "error" } else { "verify" };
            log.push(format!("{file}:{}: {severity}: {message}", line.unwrap_or(0)));
            let suggestion = patterns.suggestion_for(category, &message, line);
            let e = ClassifiedError { category, message, source_line: line, suggestion };
            let bucket = if category.is_syntax() { &mut es } else { &mut ev };
            if !bucket.iter().any(|x: &ClassifiedError| x.category == e.category && x.source_line == e.source_line) {
                bucket.push(e);
            }
        };

        let extracted = match extract_contract(source, &self.method) {
            Ok(x) => x,
            Err(ContractError::NoContractFound(_)) => return VerifierResult::empty(),
            Err(e @ (ContractError::MethodNotFound(_) | ContractError::AmbiguousMethod { .. })) => {
                return VerifierResult::with_status(VerifierStatus::ToolError, e.to_string());
            }
            Err(e) => {
                let category = if matches!(e, ContractError::Scope(_)) { ErrorCategory::Type } else { ErrorCategory::Syntax };
                let line = match &e {
                    ContractError::Syntax { clause, .. } => line_of(source, clause),
                    ContractError::UnknownClause(word) => line_of(source, word),
                    ContractError::Lex(l) => Some(line_at(source, l.position)),
                    _ => None,
                };
                report(category, line, e.to_string(), &mut log);
                return finish(es, ev, log);
            }
        };
        let contract = &extracted.contract;
        let spans: Vec<_> = extracted.annotation_spans.clone();
        let requires_lines = clause_lines(source, &spans, "requires|pre|requires_redundantly|pre_redundantly");
        let ensures_lines = clause_lines(source, &spans, "ensures|post|ensures_redundantly|post_redundantly");
        let names = self.suite.signature.param_names();
        let env_for = |pair: &Pair, with_result: bool| {
            Env::harness(names.iter().cloned().zip(pair.inputs.iter().cloned()), with_result.then(|| pair.output.clone()))
        };

        // Inputs admitted by every requires clause.
        let mut admitted = Vec::new();
        'pairs: for pair in &self.suite.valid_pairs {
            let env = env_for(pair, false);
            for (i, r) in contract.requires.iter().enumerate() {
                match evaluate(r, &env, &self.eval) {
                    Verdict::Holds => {}
                    Verdict::Violated => continue 'pairs,
                    Verdict::EvalError { reason, at } => {
                        let line = requires_lines.get(i).copied();
                        report(error_category(reason), line, format!("requires clause `{r}` cannot be evaluated: {reason:?} at {at}"), &mut log);
                        continue 'pairs;
                    }
                }
            }
            admitted.push(pair);
        }

        for (i, clause) in contract.ensures.iter().enumerate() {
            let line = ensures_lines.get(i).copied();
            for pair in &admitted {
                match evaluate(clause, &env_for(pair, true), &self.eval) {
                    Verdict::Holds => {}
                    Verdict::Violated => {
                        let msg = format!(
                            "The prover cannot establish an assertion (Postcondition: {file}:{}:) in method {}: `{clause}` fails for {}",
                            line.unwrap_or(0),
                            self.method,
                            describe(&names, pair),
                        );
                        report(ErrorCategory::PostconditionNotProven, line, msg, &mut log);
                        break;
                    }
                    Verdict::EvalError { reason, at } => {
                        report(
                            error_category(reason),
                            line,
                            format!("ensures clause `{clause}` cannot be evaluated for {}: {reason:?} at {at}", describe(&names, pair)),
                            &mut log,
                        );
                        break;
                    }
                }
            }
        }
        finish(es, ev, log)
    }
}

fn finish(es: Vec<ClassifiedError>, ev: Vec<ClassifiedError>, log: Vec<String>) -> VerifierResult {
    let mut raw = log.join("\n");
    if !raw.is_empty() {
        raw.push('\n');
    }
    VerifierResult::from_classified(es, ev, Some(0), raw)
}

fn error_category(reason: EvalErrorReason) -> ErrorCategory {
    match reason {
        EvalErrorReason::TypeMismatch | EvalErrorReason::UnboundIdentifier => ErrorCategory::Type,
        EvalErrorReason::DivisionByZero | EvalErrorReason::IndexOutOfBounds => ErrorCategory::ArithmeticCheck,
        EvalErrorReason::NullDereference => ErrorCategory::NullnessCheck,
        EvalErrorReason::QuantifierBudgetExceeded | EvalErrorReason::BackendTimeout => ErrorCategory::TimeoutObligation,
        _ => ErrorCategory::Unknown,
    }
}

fn describe(names: &[String], pair: &Pair) -> String {
    let args: Vec<String> = names.iter().zip(&pair.inputs).map(|(n, v)| format!("{n} = {v}")).collect();
    format!("{} with \\result = {}", args.join(", "), pair.output)
}

fn line_at(source: &str, offset: usize) -> u32 {
    source[..offset.min(source.len())].matches('\n').count() as u32 + 1
}

fn line_of(source: &str, needle: &str) -> Option<u32> {
    let needle = needle.lines().next().unwrap_or("").trim();
    if needle.is_empty() {
        return None;
    }
    source.find(needle).map(|at| line_at(source, at))
}

// 1-based lines of clause keywords inside the annotation spans, in order.
fn clause_lines(source: &str, spans: &[std::ops::Range<usize>], keywords: &str) -> Vec<u32> {
    let re = Regex::new(&format!(r"\b({keywords})\b")).expect("static regex");
    spans
        .iter()
        .flat_map(|s| re.find_iter(&source[s.clone()]).map(move |m| line_at(source, s.start + m.start())))
        .collect()
}
