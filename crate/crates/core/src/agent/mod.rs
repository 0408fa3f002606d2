//! Verifier-guided contract synthesis loop.
//!
//! The model acts only through four tools. The runtime owns the rules: every
//! candidate must leave the Java code untouched, the harness only runs on a
//! verified candidate, and completion is accepted only when the last harness
//! report clears the thresholds.

mod guard;
mod provider;
mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

pub use guard::{guard_code_unaltered, GuardError};
pub use provider::{
    parse_wire_response, wire_request, AssistantReply, ChatProvider, HttpProvider, HttpProviderConfig, Message,
    ProviderError, ResponseScript, Role, ScriptedProvider, ToolCall, ToolSchema, DEFAULT_API_KEY_ENV,
    SCRIPT_SCHEMA_VERSION,
};
pub use render::{render_tool_result, truncate, ToolResult, MAX_OBSERVATION_CHARS};

use crate::harness::{meaningfully_verified, spec_harness_report, HarnessBackend, HarnessOptions, HarnessReport, Thresholds};
use crate::java::tokenize;
use crate::jml::contract::find_method_declarations;
use crate::jml::{extract_contract, strip_annotations, Contract};
use crate::testkit::{MutationConfig, TestSuite};
use crate::verify::{graduated_score, verify_annotated, PatternTable, VerifierBackend, VerifierResult, VerifierStatus, VerifyError};

pub const SYSTEM_PROMPT: &str = include_str!("../../assets/system_prompt.md");
pub const TRAJECTORY_SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERIFY: &str = "verify_with_openjml";
pub const TOOL_ANALYZE: &str = "analyze_openjml_errors";
pub const TOOL_HARNESS: &str = "run_spec_harness";
pub const TOOL_COMPLETE: &str = "task_complete";

/// Consecutive refused candidates that end the run.
const GUARD_LIMIT: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct AgentConfig {
    pub max_steps: usize,
    /// A re-planning prompt follows every this many tool calls.
    pub planning_interval: usize,
    /// Harness evaluations below threshold tolerated before giving up.
    pub max_refinement_cycles: usize,
    pub max_pairs: usize,
    pub thresholds: Thresholds,
    pub random_seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            max_steps: 12,
            planning_interval: 4,
            max_refinement_cycles: 3,
            max_pairs: 5,
            thresholds: Thresholds::default(),
            random_seed: 0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.max_steps == 0 {
            return Err(AgentError::Config("maxSteps must be at least 1".into()));
        }
        if self.planning_interval == 0 || self.max_refinement_cycles == 0 || self.max_pairs == 0 {
            return Err(AgentError::Config("planningInterval, maxRefinementCycles and maxPairs must be at least 1".into()));
        }
        if !unit(self.thresholds.post_corr) || !unit(self.thresholds.post_comp) {
            return Err(AgentError::Config("thresholds must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn harness_options(&self) -> HarnessOptions {
        HarnessOptions {
            mutation: MutationConfig { seed: self.random_seed, ..MutationConfig::default() },
            thresholds: self.thresholds,
            timings: false,
            max_pairs: Some(self.max_pairs),
        }
    }
}

/// A Java source and the method whose contract is wanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AgentTask {
    pub id: String,
    pub source: String,
    pub method: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Completed,
    ExhaustedSteps,
    Guarded,
    ProviderError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Step {
    pub index: usize,
    pub thought: String,
    pub action: ToolCall,
    pub observation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub schema_version: u32,
    pub task_id: String,
    pub method: String,
    pub provider: String,
    pub config: AgentConfig,
    pub steps: Vec<Step>,
    /// Step counts after which a re-planning prompt was sent.
    pub replans: Vec<usize>,
    /// Replies refused for breaking the one-tool-call protocol.
    pub malformed_replies: usize,
    pub outcome: Outcome,
    pub outcome_detail: String,
    pub final_source: Option<String>,
    pub final_contract: Option<Contract>,
    pub final_report: Option<HarnessReport>,
}

impl Trajectory {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trajectory serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Trajectory, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("agent config: {0}")]
    Config(String),
    #[error("task: {0}")]
    Task(String),
    #[error("verifier unavailable: {0}")]
    BackendUnavailable(String),
}

impl From<VerifyError> for AgentError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::BackendUnavailable(m) => AgentError::BackendUnavailable(m),
            other => AgentError::Task(other.to_string()),
        }
    }
}

pub fn tool_schemas() -> Vec<ToolSchema> {
    let clauses = json!({"type": "array", "items": {"type": "string"}});
    vec![
        ToolSchema {
            name: TOOL_VERIFY,
            description: "Verify a candidate contract. Give either the clause lists or the whole annotated source.",
            parameters: json!({
                "type": "object",
                "properties": {"requires": clauses, "ensures": clauses, "source": {"type": "string"}},
            }),
        },
        ToolSchema {
            name: TOOL_ANALYZE,
            description: "Score the last verifier result and list each error with a repair hint.",
            parameters: json!({"type": "object", "properties": {}}),
        },
        ToolSchema {
            name: TOOL_HARNESS,
            description: "Measure the last verified contract on concrete tests and output mutants.",
            parameters: json!({"type": "object", "properties": {}}),
        },
        ToolSchema {
            name: TOOL_COMPLETE,
            description: "Finish once the last harness report meets the thresholds.",
            parameters: json!({"type": "object", "properties": {"summary": {"type": "string"}}}),
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
enum Candidate {
    Source(String),
    Clauses { requires: Vec<String>, ensures: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
enum Action {
    Verify(Candidate),
    Analyze,
    Harness,
    Complete,
}

fn string_list(args: &serde_json::Map<String, Json>, key: &str) -> Result<Vec<String>, String> {
    match args.get(key) {
        None => Ok(vec![]),
        Some(Json::Array(items)) => items
            .iter()
            .map(|i| i.as_str().map(str::to_string).ok_or_else(|| format!("`{key}` must be a list of strings")))
            .collect(),
        Some(_) => Err(format!("`{key}` must be a list of strings")),
    }
}

fn parse_action(reply: &AssistantReply) -> Result<(ToolCall, Action), String> {
    let [call] = reply.tool_calls.as_slice() else {
        return Err(format!("expected exactly one tool call, got {}", reply.tool_calls.len()));
    };
    let empty = serde_json::Map::new();
    let args = match &call.arguments {
        Json::Object(m) => m,
        Json::Null => &empty,
        other => return Err(format!("arguments of `{}` must be a JSON object, got {other}", call.name)),
    };
    let action = match call.name.as_str() {
        TOOL_VERIFY => match args.get("source") {
            Some(Json::String(s)) if !args.contains_key("requires") && !args.contains_key("ensures") => {
                Action::Verify(Candidate::Source(s.clone()))
            }
            Some(_) => return Err("give either `source` (a string) or `requires`/`ensures`, not both".into()),
            None => {
                let requires = string_list(args, "requires")?;
                let ensures = string_list(args, "ensures")?;
                if requires.is_empty() && ensures.is_empty() {
                    return Err(format!("`{TOOL_VERIFY}` needs `source` or at least one clause"));
                }
                Action::Verify(Candidate::Clauses { requires, ensures })
            }
        },
        TOOL_ANALYZE => Action::Analyze,
        TOOL_HARNESS => Action::Harness,
        TOOL_COMPLETE => Action::Complete,
        other => return Err(format!("unknown tool `{other}`")),
    };
    Ok((call.clone(), action))
}

/// `original` with its annotations replaced by the given clauses above the
/// method. Clause text is inserted verbatim.
pub fn annotate_with_clauses(original: &str, method: &str, requires: &[String], ensures: &[String]) -> Result<String, String> {
    let bare = strip_annotations(original);
    let tokens = tokenize(&bare).map_err(|e| e.to_string())?;
    let decls = find_method_declarations(&bare, &tokens, method);
    let decl = match decls.as_slice() {
        [d] => d,
        [] => return Err(format!("method `{method}` not found")),
        _ => return Err(format!("method `{method}` is declared {} times", decls.len())),
    };
    let start = tokens[decl.first_token].span.start;
    let line_start = bare[..start].rfind('\n').map_or(0, |i| i + 1);
    let indent: String = bare[line_start..start].chars().take_while(|c| c.is_whitespace()).collect();
    let mut block = format!("{indent}/*@\n");
    for r in requires {
        block.push_str(&format!("{indent}  @ requires {r};\n"));
    }
    for e in ensures {
        block.push_str(&format!("{indent}  @ ensures {e};\n"));
    }
    block.push_str(&format!("{indent}  @*/\n"));
    Ok(format!("{}{block}{}", &bare[..line_start], &bare[line_start..]))
}

struct Scratch {
    candidate: Option<String>,
    last_verify: Option<VerifierResult>,
    /// The current candidate, when it verified.
    verified: Option<(String, Contract)>,
    last_report: Option<HarnessReport>,
    guard_failures: usize,
    failed_cycles: usize,
}

impl Scratch {
    fn entries(&self, cfg: &AgentConfig, steps: usize) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("steps used", format!("{steps}/{}", cfg.max_steps));
        m.insert("refinement cycles used", format!("{}/{}", self.failed_cycles, cfg.max_refinement_cycles));
        if let Some(c) = &self.candidate {
            m.insert("current candidate", c.clone());
        }
        if let Some(r) = &self.last_verify {
            m.insert("last verifier status", r.status.to_string());
        }
        if let Some(r) = &self.last_report {
            m.insert("last harness scores", r.score_lines().trim_end().replace('\n', ", "));
        }
        m
    }

    fn message(&self, cfg: &AgentConfig, steps: usize) -> Message {
        let mut text = String::from("Shared state:\n");
        for (k, v) in self.entries(cfg, steps) {
            if v.contains('\n') {
                text.push_str(&format!("- {k}:\n{v}\n"));
            } else {
                text.push_str(&format!("- {k}: {v}\n"));
            }
        }
        Message::new(Role::User, text)
    }
}

enum Control {
    Continue,
    Finish(Outcome, String),
}

struct Run<'a> {
    task: &'a AgentTask,
    suite: &'a TestSuite,
    cfg: &'a AgentConfig,
    verifier: &'a VerifierBackend,
    harness: &'a HarnessBackend,
    patterns: &'a PatternTable,
    scratch: Scratch,
}

impl Run<'_> {
    fn execute(&mut self, action: Action) -> Result<(ToolResult, Control), AgentError> {
        let s = &mut self.scratch;
        match action {
            Action::Verify(candidate) => {
                let source = match candidate {
                    Candidate::Source(src) => src,
                    Candidate::Clauses { requires, ensures } => {
                        annotate_with_clauses(&self.task.source, &self.task.method, &requires, &ensures).map_err(AgentError::Task)?
                    }
                };
                if let Err(e) = guard_code_unaltered(&self.task.source, &source) {
                    s.guard_failures += 1;
                    let msg = format!("Candidate refused: {e}. Only JML annotations may change.");
                    let control = if s.guard_failures >= GUARD_LIMIT {
                        Control::Finish(Outcome::Guarded, format!("{} consecutive candidates altered the code", s.guard_failures))
                    } else {
                        Control::Continue
                    };
                    return Ok((ToolResult::Rejected(msg), control));
                }
                s.guard_failures = 0;
                let result = verify_annotated(&source, self.verifier, self.patterns)?;
                s.verified = None;
                s.last_report = None;
                if result.status == VerifierStatus::Verified {
                    match extract_contract(&source, &self.task.method) {
                        Ok(x) => s.verified = Some((source.clone(), x.contract)),
                        Err(e) => return Err(AgentError::Task(format!("verified candidate has no readable contract: {e}"))),
                    }
                }
                s.candidate = Some(source);
                s.last_verify = Some(result.clone());
                Ok((ToolResult::Verification(result), Control::Continue))
            }
            Action::Analyze => match &s.last_verify {
                None => Ok((ToolResult::Rejected(format!("Nothing to analyze yet; call `{TOOL_VERIFY}` first.")), Control::Continue)),
                Some(r) => {
                    let (score, feedback) = graduated_score(r);
                    Ok((ToolResult::Analysis { score, feedback }, Control::Continue))
                }
            },
            Action::Harness => {
                let Some((_, contract)) = &s.verified else {
                    let msg = format!("The harness runs only on a verified candidate; call `{TOOL_VERIFY}` until it verifies.");
                    return Ok((ToolResult::Rejected(msg), Control::Continue));
                };
                let report = match spec_harness_report(contract, self.suite, &self.cfg.harness_options(), self.harness) {
                    Ok(r) => r,
                    Err(crate::harness::HarnessError::BackendUnavailable(m)) => return Err(AgentError::BackendUnavailable(m)),
                    Err(e) => return Ok((ToolResult::Rejected(format!("The harness could not run: {e}")), Control::Continue)),
                };
                let control = if report.meaningfully_verified {
                    Control::Continue
                } else {
                    s.failed_cycles += 1;
                    if s.failed_cycles >= self.cfg.max_refinement_cycles {
                        Control::Finish(
                            Outcome::ExhaustedSteps,
                            format!("{} refinement cycles ended below the harness thresholds", s.failed_cycles),
                        )
                    } else {
                        Control::Continue
                    }
                };
                s.last_report = Some(report.clone());
                Ok((ToolResult::Harness(Box::new(report)), control))
            }
            Action::Complete => {
                let passed = s.last_report.as_ref().is_some_and(|r| meaningfully_verified(&r.scores, &self.cfg.thresholds));
                if passed {
                    Ok((
                        ToolResult::Completion { accepted: true, message: "The contract is verified and meaningfully verified.".into() },
                        Control::Finish(Outcome::Completed, "task_complete accepted".into()),
                    ))
                } else {
                    let why = match &s.last_report {
                        None => format!("No harness report for the current candidate; call `{TOOL_HARNESS}` first."),
                        Some(r) => format!(
                            "The last harness report does not meet the thresholds (postCorr {:.4} >= {:.4}, postComp {:.4} >= {:.4} required).",
                            r.scores.post_corr, self.cfg.thresholds.post_corr, r.scores.post_comp, self.cfg.thresholds.post_comp
                        ),
                    };
                    Ok((ToolResult::Completion { accepted: false, message: why }, Control::Continue))
                }
            }
        }
    }
}

fn task_message(task: &AgentTask) -> String {
    format!(
        "Task {}: write a JML contract for method `{}`.\n\n```java\n{}\n```",
        task.id,
        task.method,
        task.source.trim_end()
    )
}

fn replan_message(steps: usize, cfg: &AgentConfig) -> String {
    format!(
        "Re-plan: {steps} of {} tool calls used. Review the shared state, say what is still missing, and choose the next tool.",
        cfg.max_steps
    )
}

/// Runs the loop to one of its four outcomes. Errors are reserved for
/// problems outside the model's control: bad configuration, an unusable
/// task, or a missing verifier.
pub fn run_veriact(
    task: &AgentTask,
    suite: &TestSuite,
    cfg: &AgentConfig,
    provider: &mut dyn ChatProvider,
    verifier: &VerifierBackend,
    harness: &HarnessBackend,
    patterns: &PatternTable,
) -> Result<Trajectory, AgentError> {
    cfg.validate()?;
    suite.validate().map_err(|e| AgentError::Task(e.to_string()))?;
    verifier.probe()?;
    annotate_with_clauses(&task.source, &task.method, &[], &[]).map_err(AgentError::Task)?;

    let tools = tool_schemas();
    let mut history = vec![Message::new(Role::System, SYSTEM_PROMPT), Message::new(Role::User, task_message(task))];
    let mut run = Run {
        task,
        suite,
        cfg,
        verifier,
        harness,
        patterns,
        scratch: Scratch {
            candidate: None,
            last_verify: None,
            verified: None,
            last_report: None,
            guard_failures: 0,
            failed_cycles: 0,
        },
    };
    let mut steps: Vec<Step> = Vec::new();
    let mut replans = Vec::new();
    let mut malformed_total = 0;
    let mut malformed_streak = 0;
    let mut finish = None;

    while steps.len() < cfg.max_steps {
        let mut prompt = history.clone();
        prompt.push(run.scratch.message(cfg, steps.len()));
        let reply = match provider.complete(&prompt, &tools) {
            Ok(r) => r,
            Err(e) => {
                finish = Some((Outcome::ProviderError, e.to_string()));
                break;
            }
        };
        let (call, action) = match parse_action(&reply) {
            Ok(x) => x,
            Err(why) => {
                malformed_total += 1;
                malformed_streak += 1;
                if malformed_streak >= 2 {
                    finish = Some((Outcome::ProviderError, format!("two malformed replies in a row: {why}")));
                    break;
                }
                history.push(Message::new(Role::Assistant, reply.content));
                history.push(Message::new(
                    Role::User,
                    format!("Your reply was not a valid tool call ({why}). Answer with exactly one call to one of the four tools."),
                ));
                continue;
            }
        };
        malformed_streak = 0;
        let index = steps.len() + 1;
        let call_id = format!("call_{index}");
        let (result, control) = run.execute(action)?;
        let observation = render_tool_result(&call.name, &result);

        let mut assistant = Message::new(Role::Assistant, reply.content.clone());
        assistant.tool_calls = vec![call.clone()];
        assistant.call_id = Some(call_id.clone());
        let mut tool = Message::new(Role::Tool, observation.clone());
        tool.call_id = Some(call_id);
        history.push(assistant);
        history.push(tool);
        steps.push(Step { index, thought: reply.content, action: call, observation });

        if let Control::Finish(outcome, detail) = control {
            finish = Some((outcome, detail));
            break;
        }
        if steps.len() % cfg.planning_interval == 0 && steps.len() < cfg.max_steps {
            history.push(Message::new(Role::User, replan_message(steps.len(), cfg)));
            replans.push(steps.len());
        }
    }

    let (outcome, outcome_detail) =
        finish.unwrap_or_else(|| (Outcome::ExhaustedSteps, format!("step budget of {} tool calls used up", cfg.max_steps)));
    let s = run.scratch;
    Ok(Trajectory {
        schema_version: TRAJECTORY_SCHEMA_VERSION,
        task_id: task.id.clone(),
        method: task.method.clone(),
        provider: provider.identity(),
        config: cfg.clone(),
        steps,
        replans,
        malformed_replies: malformed_total,
        outcome,
        outcome_detail,
        final_source: s.verified.as_ref().map(|(src, _)| src.clone()),
        final_contract: s.verified.map(|(_, c)| c),
        final_report: s.last_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{MethodSignature, Pair, TypeTag, Value};
    use crate::verify::BuiltinVerifier;

    const CC: &str = include_str!("../../tests/fixtures/changecase/ChangeCase.java");

    fn suite() -> TestSuite {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let pairs = [('b', 'B'), ('B', 'b'), ('!', '!'), ('0', '0'), ('|', '|')]
            .iter()
            .map(|&(i, o)| Pair::new(vec![Value::char(i)], Value::char(o)))
            .collect();
        TestSuite::new(sig, pairs, vec![])
    }

    fn task() -> AgentTask {
        AgentTask { id: "changecase".into(), source: strip_annotations(CC), method: "changeCase".into() }
    }

    fn call(name: &str, args: Json) -> AssistantReply {
        AssistantReply { content: format!("use {name}"), tool_calls: vec![ToolCall { name: name.into(), arguments: args }] }
    }

    fn run(responses: Vec<AssistantReply>, repeat: bool) -> Trajectory {
        let mut p = ScriptedProvider::new(ResponseScript { schema_version: 1, name: "t".into(), responses, repeat }).unwrap();
        let verifier = VerifierBackend::Builtin(BuiltinVerifier::new("changeCase", suite()));
        run_veriact(&task(), &suite(), &AgentConfig::default(), &mut p, &verifier, &HarnessBackend::default(), &PatternTable::builtin())
            .unwrap()
    }

    #[test]
    fn clauses_are_inserted_above_the_method() {
        let src = annotate_with_clauses(&task().source, "changeCase", &["c > 0".into()], &["\\result == c".into()]).unwrap();
        assert!(src.contains("    /*@\n      @ requires c > 0;\n      @ ensures \\result == c;\n      @*/\n    public char changeCase"));
        assert_eq!(guard_code_unaltered(CC, &src), Ok(()));
        assert!(annotate_with_clauses(CC, "missing", &[], &[]).is_err());
    }

    #[test]
    fn premature_completion_is_refused() {
        let t = run(vec![call(TOOL_COMPLETE, json!({}))], false);
        assert_eq!(t.outcome, Outcome::ProviderError);
        assert!(t.steps[0].observation.starts_with("[task_complete]\nNOT COMPLETE"));
    }

    #[test]
    fn two_malformed_replies_abort() {
        let t = run(vec![call("bogus", json!({})), call(TOOL_VERIFY, json!("x"))], false);
        assert_eq!(t.outcome, Outcome::ProviderError);
        assert_eq!(t.malformed_replies, 2);
        assert!(t.steps.is_empty());
    }

    #[test]
    fn one_malformed_reply_is_retried() {
        let t = run(vec![AssistantReply { content: "hmm".into(), tool_calls: vec![] }, call(TOOL_ANALYZE, json!({}))], false);
        assert_eq!(t.malformed_replies, 1);
        assert_eq!(t.steps.len(), 1);
        assert!(t.steps[0].observation.contains("REJECTED"));
    }

    #[test]
    fn step_budget_bounds_every_run() {
        let t = run(vec![call(TOOL_ANALYZE, json!({}))], true);
        assert_eq!(t.outcome, Outcome::ExhaustedSteps);
        assert_eq!(t.steps.len(), 12);
        assert_eq!(t.replans, vec![4, 8]);
    }

    #[test]
    fn config_bounds() {
        assert!(AgentConfig { max_steps: 0, ..Default::default() }.validate().is_err());
        let t = Thresholds { post_corr: 1.5, post_comp: 0.5 };
        assert!(AgentConfig { thresholds: t, ..Default::default() }.validate().is_err());
        let parsed: AgentConfig = serde_json::from_str(r#"{"maxSteps": 3}"#).unwrap();
        assert_eq!(parsed, AgentConfig { max_steps: 3, ..Default::default() });
    }
}
