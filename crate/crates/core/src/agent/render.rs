use crate::harness::HarnessReport;
use crate::verify::{VerifierResult, VerifierStatus};

/// Longest observation handed back to the model.
pub const MAX_OBSERVATION_CHARS: usize = 4000;
const SAMPLE_ITEMS: usize = 3;

/// What a tool produced, before rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum ToolResult {
    Verification(VerifierResult),
    Analysis { score: f64, feedback: String },
    Harness(Box<HarnessReport>),
    Completion { accepted: bool, message: String },
    /// The call was refused without running anything.
    Rejected(String),
}

/// Deterministic, length-bounded text for one tool result.
pub fn render_tool_result(tool: &str, result: &ToolResult) -> String {
    let body = match result {
        ToolResult::Verification(r) if r.status == VerifierStatus::Verified => {
            "VERIFIED\nThe verifier accepted the annotated method with no errors.".to_string()
        }
        ToolResult::Verification(r) => render_verification(r),
        ToolResult::Analysis { score, feedback } => format!("SCORE: {score:.4}\n{feedback}"),
        ToolResult::Harness(report) => render_report(report),
        ToolResult::Completion { accepted: true, message } => format!("COMPLETE\n{message}"),
        ToolResult::Completion { accepted: false, message } => format!("NOT COMPLETE\n{message}"),
        ToolResult::Rejected(why) => format!("REJECTED\n{why}"),
    };
    truncate(&format!("[{tool}]\n{body}"), MAX_OBSERVATION_CHARS)
}

fn render_verification(r: &VerifierResult) -> String {
    let mut out = format!(
        "STATUS: {}\nsyntax errors: {}\nverification errors: {}\n",
        r.status,
        r.syntax_errors.len(),
        r.verification_errors.len()
    );
    for e in r.syntax_errors.iter().chain(&r.verification_errors) {
        let line = e.source_line.map_or_else(|| "?".to_string(), |l| l.to_string());
        out.push_str(&format!("- [{}] line {line}: {}\n", e.category, e.message));
    }
    if !r.raw_log.is_empty() {
        out.push_str("raw log:\n");
        out.push_str(&r.raw_log);
    }
    out.trim_end().to_string()
}

fn render_report(r: &HarnessReport) -> String {
    let p = &r.pool_sizes;
    let e = &r.eval_errors;
    let mut out = format!(
        "SPEC-HARNESS\n{}meaningfully verified: {} (thresholds postCorr >= {:.4}, postComp >= {:.4})\n\
         pool sizes: pairs={} mutants={} rejected={} validInputs={} invalidInputs={}\n\
         eval errors: postCorr={} postComp={} preCorr={} preComp={}\n",
        r.score_lines(),
        if r.meaningfully_verified { "yes" } else { "no" },
        r.thresholds.post_corr,
        r.thresholds.post_comp,
        p.pairs,
        p.mutants,
        p.rejected_mutants,
        p.valid_inputs,
        p.invalid_inputs,
        e.post_corr,
        e.post_comp,
        e.pre_corr,
        e.pre_comp,
    );
    let args = |v: &[crate::Value]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let rejected: Vec<String> = r
        .pair_verdicts
        .iter()
        .filter(|i| !i.verdict.is_holds())
        .take(SAMPLE_ITEMS)
        .map(|i| format!("  ({}) -> {} [{}]", args(&i.inputs), i.output.as_ref().map_or_else(String::new, |o| o.to_string()), i.verdict.label()))
        .collect();
    if !rejected.is_empty() {
        out.push_str("valid pairs the postcondition rejects:\n");
        out.push_str(&(rejected.join("\n") + "\n"));
    }
    let accepted: Vec<String> = r
        .mutant_verdicts
        .iter()
        .filter(|m| !m.verdict.is_violated())
        .take(SAMPLE_ITEMS)
        .map(|m| format!("  ({}) -> {} instead of {} [{}]", args(&m.inputs), m.mutant, m.original, m.verdict.label()))
        .collect();
    if !accepted.is_empty() {
        out.push_str("wrong outputs the postcondition accepts:\n");
        out.push_str(&(accepted.join("\n") + "\n"));
    }
    let refused: Vec<String> = r
        .pre_verdicts
        .iter()
        .filter(|i| !i.verdict.is_holds())
        .take(SAMPLE_ITEMS)
        .map(|i| format!("  ({}) [{}]", args(&i.inputs), i.verdict.label()))
        .collect();
    if !refused.is_empty() {
        out.push_str("valid inputs the precondition rejects:\n");
        out.push_str(&(refused.join("\n") + "\n"));
    }
    out.trim_end().to_string()
}

/// Keeps the head and tail of `text` around a marker once it exceeds `max`
/// characters. The result never exceeds `max` characters.
pub fn truncate(text: &str, max: usize) -> String {
    let total = text.chars().count();
    if total <= max {
        return text.to_string();
    }
    let marker = |dropped: usize| format!("\n... [{dropped} characters truncated] ...\n");
    let budget = max.saturating_sub(marker(total).chars().count());
    let head = budget * 2 / 3;
    let tail = budget - head;
    let dropped = total - head - tail;
    let h: String = text.chars().take(head).collect();
    let t: String = text.chars().skip(total - tail).collect();
    format!("{h}{}{t}", marker(dropped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{ClassifiedError, ErrorCategory};

    #[test]
    fn verified_block_is_fixed() {
        let r = VerifierResult::verified("anything".into());
        assert_eq!(
            render_tool_result("verify_with_openjml", &ToolResult::Verification(r)),
            "[verify_with_openjml]\nVERIFIED\nThe verifier accepted the annotated method with no errors."
        );
    }

    #[test]
    fn failures_list_errors_and_log() {
        let e = ClassifiedError {
            category: ErrorCategory::Syntax,
            message: "bad".into(),
            source_line: Some(4),
            suggestion: "fix".into(),
        };
        let r = VerifierResult::from_classified(vec![e], vec![], Some(1), "A.java:4: error: bad\n".into());
        let text = render_tool_result("verify_with_openjml", &ToolResult::Verification(r));
        assert_eq!(
            text,
            "[verify_with_openjml]\nSTATUS: Failed\nsyntax errors: 1\nverification errors: 0\n- [Syntax] line 4: bad\nraw log:\nA.java:4: error: bad"
        );
    }

    #[test]
    fn long_text_keeps_head_and_tail() {
        let text: String = (0..2000).map(|i| format!("{:04}\n", i)).collect();
        let out = truncate(&text, MAX_OBSERVATION_CHARS);
        assert!(out.chars().count() <= MAX_OBSERVATION_CHARS);
        assert!(out.starts_with("0000\n0001\n"));
        assert!(out.ends_with("1998\n1999\n"));
        assert!(out.contains("characters truncated] ..."));
        assert_eq!(truncate("short", 10), "short");
    }

    #[test]
    fn multibyte_text_truncates_on_char_boundaries() {
        let text = "é".repeat(5000);
        let out = truncate(&text, 100);
        assert!(out.chars().count() <= 100);
    }
}
