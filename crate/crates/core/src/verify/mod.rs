//! Whole-program verification: running the verifier, classifying its
//! diagnostics into syntax errors and proof errors, and the
//! graduated optimizer score.

mod builtin;
mod openjml;
mod patterns;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::BuiltinVerifier;
pub use openjml::{run_openjml, verify_with_openjml, OpenJmlConfig, OPENJML_ENV};
pub use patterns::{classify_output, PatternError, PatternTable, DEFAULT_PATTERNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerifierStatus {
    Verified,
    Failed,
    ToolError,
    Timeout,
    /// No specification was produced.
    Empty,
}

impl VerifierStatus {
    pub const ALL: [VerifierStatus; 5] =
        [VerifierStatus::Verified, VerifierStatus::Failed, VerifierStatus::ToolError, VerifierStatus::Timeout, VerifierStatus::Empty];
}

impl fmt::Display for VerifierStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    Syntax,
    Type,
    PostconditionNotProven,
    PreconditionCallerViolation,
    AssertNotProven,
    ArithmeticCheck,
    NullnessCheck,
    TimeoutObligation,
    Unknown,
}

impl ErrorCategory {
    /// Syntax and type errors count as syntax errors; everything else is a proof error.
    pub fn is_syntax(self) -> bool {
        matches!(self, ErrorCategory::Syntax | ErrorCategory::Type)
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifiedError {
    pub category: ErrorCategory,
    pub message: String,
    pub source_line: Option<u32>,
    pub suggestion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifierResult {
    pub status: VerifierStatus,
    pub syntax_errors: Vec<ClassifiedError>,
    pub verification_errors: Vec<ClassifiedError>,
    pub raw_log: String,
    pub elapsed_ms: u64,
}

impl VerifierResult {
    pub fn verified(raw_log: String) -> VerifierResult {
        VerifierResult::with_status(VerifierStatus::Verified, raw_log)
    }

    pub fn empty() -> VerifierResult {
        VerifierResult::with_status(VerifierStatus::Empty, String::new())
    }

    pub fn with_status(status: VerifierStatus, raw_log: String) -> VerifierResult {
        VerifierResult { status, syntax_errors: vec![], verification_errors: vec![], raw_log, elapsed_ms: 0 }
    }

    /// Status derived from classified errors and the tool's exit code.
    pub fn from_classified(
        syntax_errors: Vec<ClassifiedError>,
        verification_errors: Vec<ClassifiedError>,
        exit_code: Option<i32>,
        raw_log: String,
    ) -> VerifierResult {
        let status = if !syntax_errors.is_empty() || !verification_errors.is_empty() {
            VerifierStatus::Failed
        } else if exit_code == Some(0) {
            VerifierStatus::Verified
        } else {
            VerifierStatus::ToolError
        };
        VerifierResult { status, syntax_errors, verification_errors, raw_log, elapsed_ms: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("verifier unavailable: {0}")]
    BackendUnavailable(String),
    #[error("empty input")]
    EmptyInput,
    #[error("{0}")]
    Io(String),
}

pub const SCORE_VERIFIED: f64 = 1.0;
pub const SCORE_ONE_PROOF_ERROR: f64 = 0.3;
pub const SCORE_SEVERAL_PROOF_ERRORS: f64 = 0.1;

/// Partial-credit score for one verifier run plus a feedback text listing
/// each classified error with its repair hint.
pub fn graduated_score(r: &VerifierResult) -> (f64, String) {
    let (es, ev) = (r.syntax_errors.len(), r.verification_errors.len());
    let score = match r.status {
        VerifierStatus::Verified => SCORE_VERIFIED,
        VerifierStatus::Empty => 0.0,
        _ if es > 0 => 0.0,
        _ if ev == 1 => SCORE_ONE_PROOF_ERROR,
        _ if ev >= 2 => SCORE_SEVERAL_PROOF_ERRORS,
        _ => 0.0,
    };
    let mut feedback = match r.status {
        VerifierStatus::Verified => "Verified: the specification passes the verifier.".to_string(),
        VerifierStatus::Empty => "No specification was produced.".to_string(),
        status => format!("{status}: {es} syntax error(s), {ev} verification error(s)."),
    };
    for e in r.syntax_errors.iter().chain(&r.verification_errors) {
        let line = e.source_line.map(|l| format!("line {l}")).unwrap_or_else(|| "no line".into());
        feedback.push_str(&format!("\n- [{}] {line}: {}\n  hint: {}", e.category, e.message, e.suggestion));
    }
    if matches!(r.status, VerifierStatus::ToolError | VerifierStatus::Timeout) && es + ev == 0 {
        feedback.push_str("\n- the verifier did not produce a usable result; see the raw log");
    }
    (score, feedback)
}

/// Fraction of runs with status `Verified`.
pub fn verification_rate(statuses: &[VerifierStatus]) -> Result<f64, VerifyError> {
    if statuses.is_empty() {
        return Err(VerifyError::EmptyInput);
    }
    let verified = statuses.iter().filter(|s| **s == VerifierStatus::Verified).count();
    Ok(verified as f64 / statuses.len() as f64)
}

/// How annotated sources get verified.
#[derive(Debug, Clone)]
pub enum VerifierBackend {
    OpenJml(OpenJmlConfig),
    /// Suite-driven stand-in used when no verifier is installed.
    Builtin(BuiltinVerifier),
}

impl VerifierBackend {
    pub fn identity(&self) -> String {
        match self {
            VerifierBackend::OpenJml(cfg) => format!("openjml:{}", cfg.executable.display()),
            VerifierBackend::Builtin(_) => "builtin".into(),
        }
    }

    /// Fails with `BackendUnavailable` when the external verifier is missing.
    pub fn probe(&self) -> Result<(), VerifyError> {
        match self {
            VerifierBackend::OpenJml(cfg) => cfg.resolve_executable().map(|_| ()),
            VerifierBackend::Builtin(_) => Ok(()),
        }
    }
}

/// Runs the backend on an annotated source. A source without any JML yields
/// status `Empty` without invoking the verifier.
pub fn verify_annotated(source: &str, backend: &VerifierBackend, patterns: &PatternTable) -> Result<VerifierResult, VerifyError> {
    if !has_jml(source) {
        return Ok(VerifierResult::empty());
    }
    match backend {
        VerifierBackend::OpenJml(cfg) => verify_with_openjml(source, cfg, patterns),
        VerifierBackend::Builtin(v) => Ok(v.verify(source, patterns)),
    }
}

fn has_jml(source: &str) -> bool {
    match crate::java::tokenize(source) {
        Ok(tokens) => tokens.iter().any(|t| t.is_jml()),
        Err(_) => source.contains("//@") || source.contains("/*@"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(category: ErrorCategory) -> ClassifiedError {
        ClassifiedError { category, message: "m".into(), source_line: Some(3), suggestion: "s".into() }
    }

    fn result(status: VerifierStatus, es: usize, ev: usize) -> VerifierResult {
        VerifierResult {
            status,
            syntax_errors: vec![err(ErrorCategory::Syntax); es],
            verification_errors: vec![err(ErrorCategory::PostconditionNotProven); ev],
            raw_log: String::new(),
            elapsed_ms: 0,
        }
    }

    #[test]
    fn score_cases() {
        assert_eq!(graduated_score(&result(VerifierStatus::Verified, 0, 0)).0, 1.0);
        assert_eq!(graduated_score(&result(VerifierStatus::Failed, 0, 1)).0, 0.3);
        assert_eq!(graduated_score(&result(VerifierStatus::Failed, 0, 4)).0, 0.1);
        assert_eq!(graduated_score(&result(VerifierStatus::Failed, 2, 5)).0, 0.0);
        assert_eq!(graduated_score(&result(VerifierStatus::Empty, 0, 0)).0, 0.0);
    }

    #[test]
    fn feedback_lists_errors_with_hints() {
        let (_, fb) = graduated_score(&result(VerifierStatus::Failed, 1, 1));
        assert!(fb.starts_with("Failed: 1 syntax error(s), 1 verification error(s)."));
        assert!(fb.contains("[Syntax] line 3: m\n  hint: s"));
        assert!(fb.contains("[PostconditionNotProven]"));
    }

    #[test]
    fn rates() {
        use VerifierStatus::*;
        assert_eq!(verification_rate(&[Verified, Failed, Verified, Timeout]).unwrap(), 0.5);
        assert_eq!(verification_rate(&[Verified; 3]).unwrap(), 1.0);
        assert_eq!(verification_rate(&[]), Err(VerifyError::EmptyInput));
        let mut houdini = vec![Verified; 104];
        houdini.extend(vec![Failed; 16]);
        let vr = verification_rate(&houdini).unwrap();
        assert_eq!(format!("{:.1}", vr * 100.0), "86.7");
    }

    #[test]
    fn status_from_classification() {
        let r = VerifierResult::from_classified(vec![], vec![], Some(0), String::new());
        assert_eq!(r.status, VerifierStatus::Verified);
        let r = VerifierResult::from_classified(vec![], vec![], Some(1), String::new());
        assert_eq!(r.status, VerifierStatus::ToolError);
        let r = VerifierResult::from_classified(vec![], vec![err(ErrorCategory::Unknown)], Some(0), String::new());
        assert_eq!(r.status, VerifierStatus::Failed);
    }
}
