use std::collections::BTreeSet;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

use super::{ClassifiedError, ErrorCategory};

/// The table shipped with the crate.
pub const DEFAULT_PATTERNS: &str = include_str!("../../assets/patterns.toml");

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("pattern table: {0}")]
    Format(String),
    #[error("pattern table regex `{pattern}`: {message}")]
    Regex { pattern: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    version: u32,
    unknown_severities: Vec<String>,
    header: Vec<String>,
    #[serde(default)]
    ignore: Vec<String>,
    #[serde(default)]
    rule: Vec<RawRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    category: ErrorCategory,
    pattern: String,
    suggestion: String,
}

#[derive(Debug, Clone)]
struct Rule {
    category: ErrorCategory,
    pattern: Regex,
    suggestion: String,
}

/// Compiled regex → category → suggestion table.
#[derive(Debug, Clone)]
pub struct PatternTable {
    pub version: u32,
    unknown_severities: Vec<String>,
    headers: Vec<Regex>,
    ignore: Vec<Regex>,
    rules: Vec<Rule>,
}

fn compile(p: &str) -> Result<Regex, PatternError> {
    Regex::new(p).map_err(|e| PatternError::Regex { pattern: p.to_string(), message: e.to_string() })
}

impl PatternTable {
    pub fn parse(text: &str) -> Result<PatternTable, PatternError> {
        let raw: RawTable = toml::from_str(text).map_err(|e| PatternError::Format(e.to_string()))?;
        let headers = raw.header.iter().map(|h| compile(h)).collect::<Result<Vec<_>, _>>()?;
        if let Some(h) = headers.iter().find(|h| !h.capture_names().any(|n| n == Some("message"))) {
            return Err(PatternError::Format(format!("header `{h}` lacks a `message` group")));
        }
        Ok(PatternTable {
            version: raw.version,
            unknown_severities: raw.unknown_severities,
            headers,
            ignore: raw.ignore.iter().map(|p| compile(p)).collect::<Result<_, _>>()?,
            rules: raw
                .rule
                .into_iter()
                .map(|r| Ok(Rule { category: r.category, pattern: compile(&r.pattern)?, suggestion: r.suggestion }))
                .collect::<Result<_, PatternError>>()?,
        })
    }

    pub fn load(path: &Path) -> Result<PatternTable, PatternError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PatternError::Io { path: path.display().to_string(), message: e.to_string() })?;
        PatternTable::parse(&text)
    }

    pub fn builtin() -> PatternTable {
        PatternTable::parse(DEFAULT_PATTERNS).expect("bundled pattern table is valid")
    }

    /// Suggestion of the first rule for `category`, for errors whose category
    /// is known without matching a log line.
    pub fn suggestion_for(&self, category: ErrorCategory, message: &str, line: Option<u32>) -> String {
        match self.rules.iter().find(|r| r.category == category) {
            Some(r) => fill(&r.suggestion, message, line),
            None => fill("Inspect the diagnostic at line {line}: {message}", message, line),
        }
    }

    /// Category and suggestion for one diagnostic message.
    pub fn categorize(&self, message: &str, line: Option<u32>) -> (ErrorCategory, String) {
        match self.rules.iter().find(|r| r.pattern.is_match(message)) {
            Some(r) => (r.category, fill(&r.suggestion, message, line)),
            None => (
                ErrorCategory::Unknown,
                fill("Unrecognized verifier diagnostic at line {line}; inspect the raw log.", message, line),
            ),
        }
    }
}

fn fill(template: &str, message: &str, line: Option<u32>) -> String {
    let line = line.map(|l| l.to_string()).unwrap_or_else(|| "?".into());
    template.replace("{line}", &line).replace("{message}", message)
}

/// Splits a verifier log into syntax errors and proof errors.
/// Diagnostics that share a source line and category count once.
pub fn classify_output(raw_log: &str, _exit_code: Option<i32>, table: &PatternTable) -> (Vec<ClassifiedError>, Vec<ClassifiedError>) {
    let mut seen = BTreeSet::new();
    let (mut es, mut ev) = (Vec::new(), Vec::new());
    for line in raw_log.lines() {
        let line = line.trim_end();
        if table.ignore.iter().any(|r| r.is_match(line)) {
            continue;
        }
        let Some(caps) = table.headers.iter().find_map(|h| h.captures(line)) else { continue };
        let message = caps.name("message").map_or("", |m| m.as_str()).to_string();
        if table.ignore.iter().any(|r| r.is_match(&message)) {
            continue;
        }
        let source_line = caps.name("line").and_then(|m| m.as_str().parse().ok());
        let severity = caps.name("severity").map_or("error", |m| m.as_str());
        let (category, suggestion) = table.categorize(&message, source_line);
        if category == ErrorCategory::Unknown && !table.unknown_severities.iter().any(|s| s == severity) {
            continue;
        }
        if !seen.insert((source_line, category)) {
            continue;
        }
        let e = ClassifiedError { category, message, source_line, suggestion };
        if category.is_syntax() {
            es.push(e);
        } else {
            ev.push(e);
        }
    }
    (es, ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_parses() {
        let t = PatternTable::builtin();
        assert!(t.version >= 1);
        assert!(!t.rules.is_empty());
    }

    #[test]
    fn empty_log_has_no_errors() {
        let (es, ev) = classify_output("", Some(0), &PatternTable::builtin());
        assert!(es.is_empty() && ev.is_empty());
    }

    #[test]
    fn duplicate_obligations_collapse() {
        let log = "A.java:7: verify: The prover cannot establish an assertion (Postcondition: A.java:3:) in method f\n\
                   A.java:7: verify: The prover cannot establish an assertion (Postcondition: A.java:4:) in method f\n\
                   A.java:3: verify: Associated declaration: A.java:7:\n\
                   A.java:9: verify: The prover cannot establish an assertion (Postcondition: A.java:3:) in method f\n";
        let (es, ev) = classify_output(log, Some(1), &PatternTable::builtin());
        assert!(es.is_empty());
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0].source_line, Some(7));
        assert!(ev[0].suggestion.contains("line 7"));
    }

    #[test]
    fn unmatched_errors_become_unknown_but_warnings_do_not() {
        let log = "A.java:2: error: something nobody anticipated\nA.java:5: warning: [deprecation] old api\n";
        let (es, ev) = classify_output(log, Some(1), &PatternTable::builtin());
        assert!(es.is_empty());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].category, ErrorCategory::Unknown);
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(matches!(PatternTable::parse("version = 1"), Err(PatternError::Format(_))));
        let bad_regex = "version = 1\nunknown_severities = []\nheader = ['(?P<message>']\n";
        assert!(matches!(PatternTable::parse(bad_regex), Err(PatternError::Regex { .. })));
        let no_group = "version = 1\nunknown_severities = []\nheader = ['^x$']\n";
        assert!(matches!(PatternTable::parse(no_group), Err(PatternError::Format(_))));
    }
}
