//! Benchmark manifests, task normalization and batch evaluation with VR/MVR
//! aggregates.

mod normalize;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use normalize::{normalize_source, NormalizeError, NORMALIZED_CLASS, NORMALIZED_METHOD};
pub use report::{emit_report, summary_csv, tasks_csv, ReportFormat, SUMMARY_CSV, TASKS_CSV, REPORT_JSON};

use crate::agent::{run_veriact, AgentConfig, AgentError, AgentTask, ChatProvider, Outcome, ProviderError};
use crate::harness::{spec_harness_report, HarnessBackend, HarnessError, HarnessOptions, Thresholds};
use crate::jml::extract_contract;
use crate::testkit::{MutationConfig, TestSuite};
use crate::verify::{
    verification_rate, verify_annotated, BuiltinVerifier, OpenJmlConfig, PatternTable, VerifierBackend, VerifierStatus,
};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const BATCH_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Branch,
    MultiPathLoop,
    Nested,
    Sequential,
    SinglePathLoop,
}

impl Category {
    pub const ALL: [Category; 5] =
        [Category::Branch, Category::MultiPathLoop, Category::Nested, Category::Sequential, Category::SinglePathLoop];

    pub fn name(self) -> &'static str {
        match self {
            Category::Branch => "branch",
            Category::MultiPathLoop => "multi_path_loop",
            Category::Nested => "nested",
            Category::Sequential => "sequential",
            Category::SinglePathLoop => "single_path_loop",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    pub category: Category,
    pub source: String,
    pub method_name: String,
    pub suite_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub category: Category,
    /// Java file, relative to the manifest.
    pub file: String,
    pub method: String,
    /// Suite JSON, relative to the manifest.
    pub suite: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub tasks: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("batch config: {0}")]
    Config(String),
    #[error("verifier unavailable: {0}")]
    BackendUnavailable(String),
    #[error("task {id}: {error}")]
    Normalize { id: String, error: NormalizeError },
}

fn io_err(path: &Path, e: impl fmt::Display) -> BenchError {
    BenchError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Reads `tasks.json` and every Java file it lists. Suites stay on disk until
/// a batch needs them.
pub fn load_manifest(path: &Path) -> Result<Vec<Task>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |message: String| BenchError::Manifest { path: path.display().to_string(), message };
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(bad(format!("unsupported schemaVersion {}", manifest.schema_version)));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut seen = std::collections::BTreeSet::new();
    manifest
        .tasks
        .into_iter()
        .map(|e| {
            if !seen.insert(e.id.clone()) {
                return Err(bad(format!("duplicate task id `{}`", e.id)));
            }
            let file = dir.join(&e.file);
            let source = std::fs::read_to_string(&file).map_err(|err| io_err(&file, err))?;
            Ok(Task { id: e.id, category: e.category, source, method_name: e.method, suite_path: dir.join(e.suite) })
        })
        .collect()
}

/// Renames the class to `Solution` and the method to `solve`. Idempotent.
pub fn normalize_task(t: &Task) -> Result<Task, NormalizeError> {
    Ok(Task { source: normalize_source(&t.source, &t.method_name)?, method_name: NORMALIZED_METHOD.into(), ..t.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchMode {
    /// Verifier status only.
    Classify,
    /// Verifier status, then the harness on verified contracts.
    Harness,
    /// One agent run per task.
    Agent,
}

impl std::str::FromStr for BatchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "classify" => Ok(BatchMode::Classify),
            "harness" => Ok(BatchMode::Harness),
            "agent" => Ok(BatchMode::Agent),
            other => Err(format!("unknown batch mode `{other}` (classify, harness, agent)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum VerifierChoice {
    /// Suite-driven stand-in built per task from the task's suite.
    Builtin,
    Openjml(OpenJmlConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchConfig {
    pub mode: BatchMode,
    pub verifier: VerifierChoice,
    pub mutation: MutationConfig,
    pub thresholds: Thresholds,
    pub agent: AgentConfig,
    pub normalize: bool,
    /// Record wall clock per task. Off keeps reports byte-reproducible.
    pub timings: bool,
    /// Not part of the fingerprint: results do not depend on it.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            mode: BatchMode::Harness,
            verifier: VerifierChoice::Builtin,
            mutation: MutationConfig::default(),
            thresholds: Thresholds::default(),
            agent: AgentConfig::default(),
            normalize: true,
            timings: false,
            workers: 1,
        }
    }
}

impl BatchConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskRow {
    pub id: String,
    pub category: Category,
    pub status: VerifierStatus,
    pub post_corr: Option<f64>,
    pub post_comp: Option<f64>,
    pub pre_corr: Option<f64>,
    pub pre_comp: Option<f64>,
    pub meaningfully_verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_outcome: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl TaskRow {
    fn new(task: &Task, status: VerifierStatus) -> TaskRow {
        TaskRow {
            id: task.id.clone(),
            category: task.category,
            status,
            post_corr: None,
            post_comp: None,
            pre_corr: None,
            pre_comp: None,
            meaningfully_verified: false,
            agent_outcome: None,
            agent_steps: None,
            error: None,
            wall_ms: None,
        }
    }

    fn failed(task: &Task, error: String) -> TaskRow {
        TaskRow { error: Some(error), ..TaskRow::new(task, VerifierStatus::ToolError) }
    }
}

/// Rates in percent over one slice of the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregate {
    /// `all` or a category name.
    pub slice: String,
    pub tasks: usize,
    pub verified: usize,
    pub meaningfully_verified: usize,
    pub vr: f64,
    /// Over all tasks in the slice.
    pub mvr: f64,
    /// Over verified tasks only; `None` when none verified.
    pub mvr_of_verified: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchReport {
    pub schema_version: u32,
    pub mode: BatchMode,
    pub fingerprint: String,
    pub rows: Vec<TaskRow>,
    /// Overall first, then categories that have tasks, in fixed order.
    pub aggregates: Vec<Aggregate>,
}

fn percent(num: usize, den: usize) -> f64 {
    num as f64 * 100.0 / den as f64
}

/// Overall and per-category aggregates. Empty slices are omitted.
pub fn aggregate(rows: &[TaskRow]) -> Vec<Aggregate> {
    let slice = |name: &str, rows: Vec<&TaskRow>| -> Option<Aggregate> {
        if rows.is_empty() {
            return None;
        }
        let statuses: Vec<_> = rows.iter().map(|r| r.status).collect();
        let verified = statuses.iter().filter(|s| **s == VerifierStatus::Verified).count();
        let mvr_count = rows.iter().filter(|r| r.meaningfully_verified && r.status == VerifierStatus::Verified).count();
        Some(Aggregate {
            slice: name.to_string(),
            tasks: rows.len(),
            verified,
            meaningfully_verified: mvr_count,
            vr: verification_rate(&statuses).expect("non-empty slice") * 100.0,
            mvr: percent(mvr_count, rows.len()),
            mvr_of_verified: (verified > 0).then(|| percent(mvr_count, verified)),
        })
    };
    let mut out: Vec<Aggregate> = slice("all", rows.iter().collect()).into_iter().collect();
    for c in Category::ALL {
        out.extend(slice(c.name(), rows.iter().filter(|r| r.category == c).collect()));
    }
    out
}

/// Builds a fresh provider for one agent run.
pub type ProviderFactory<'a> = dyn Fn(&Task) -> Result<Box<dyn ChatProvider>, ProviderError> + Sync + 'a;

fn verifier_for(cfg: &BatchConfig, method: &str, suite: &TestSuite) -> VerifierBackend {
    match &cfg.verifier {
        VerifierChoice::Builtin => VerifierBackend::Builtin(BuiltinVerifier::new(method, suite.clone())),
        VerifierChoice::Openjml(o) => VerifierBackend::OpenJml(o.clone()),
    }
}

fn harness_backend(cfg: &BatchConfig) -> HarnessBackend {
    match &cfg.verifier {
        VerifierChoice::Builtin => HarnessBackend::default(),
        VerifierChoice::Openjml(o) => HarnessBackend::OpenJml(o.clone()),
    }
}

fn run_task(task: &Task, cfg: &BatchConfig, patterns: &PatternTable, providers: Option<&ProviderFactory<'_>>) -> TaskRow {
    let task = if cfg.normalize {
        match normalize_task(task) {
            Ok(t) => t,
            Err(e) => return TaskRow::failed(task, format!("normalize: {e}")),
        }
    } else {
        task.clone()
    };
    let suite = match TestSuite::load(&task.suite_path) {
        Ok(s) => s,
        Err(e) => return TaskRow::failed(&task, format!("suite {}: {e}", task.suite_path.display())),
    };
    let verifier = verifier_for(cfg, &task.method_name, &suite);

    if cfg.mode == BatchMode::Agent {
        let Some(factory) = providers else { return TaskRow::failed(&task, "no provider configured".into()) };
        let mut provider = match factory(&task) {
            Ok(p) => p,
            Err(e) => return TaskRow::failed(&task, e.to_string()),
        };
        let agent_task = AgentTask { id: task.id.clone(), source: task.source.clone(), method: task.method_name.clone() };
        let agent_cfg = AgentConfig { thresholds: cfg.thresholds, ..cfg.agent.clone() };
        return match run_veriact(&agent_task, &suite, &agent_cfg, provider.as_mut(), &verifier, &harness_backend(cfg), patterns) {
            Ok(t) => {
                let status = if t.final_source.is_some() { VerifierStatus::Verified } else { VerifierStatus::Failed };
                let mut row = TaskRow::new(&task, status);
                if let Some(r) = &t.final_report {
                    row.post_corr = Some(r.scores.post_corr);
                    row.post_comp = Some(r.scores.post_comp);
                    row.pre_corr = Some(r.scores.pre_corr);
                    row.pre_comp = r.scores.pre_comp;
                    row.meaningfully_verified = status == VerifierStatus::Verified && r.meaningfully_verified;
                }
                row.agent_outcome = Some(t.outcome);
                row.agent_steps = Some(t.steps.len());
                row
            }
            Err(AgentError::BackendUnavailable(m)) => TaskRow::failed(&task, format!("verifier unavailable: {m}")),
            Err(e) => TaskRow::failed(&task, e.to_string()),
        };
    }

    let result = match verify_annotated(&task.source, &verifier, patterns) {
        Ok(r) => r,
        Err(e) => return TaskRow::failed(&task, e.to_string()),
    };
    let mut row = TaskRow::new(&task, result.status);
    if cfg.mode == BatchMode::Classify || result.status != VerifierStatus::Verified {
        return row;
    }
    let contract = match extract_contract(&task.source, &task.method_name) {
        Ok(x) => x.contract,
        Err(e) => return TaskRow { error: Some(format!("contract: {e}")), ..row },
    };
    let opts = HarnessOptions { mutation: cfg.mutation.clone(), thresholds: cfg.thresholds, timings: false, max_pairs: None };
    match spec_harness_report(&contract, &suite, &opts, &harness_backend(cfg)) {
        Ok(r) => {
            row.post_corr = Some(r.scores.post_corr);
            row.post_comp = Some(r.scores.post_comp);
            row.pre_corr = Some(r.scores.pre_corr);
            row.pre_comp = r.scores.pre_comp;
            row.meaningfully_verified = r.meaningfully_verified;
        }
        Err(e @ HarnessError::BackendUnavailable(_)) => row.error = Some(e.to_string()),
        Err(e) => row.error = Some(format!("harness: {e}")),
    }
    row
}

/// Evaluates every task. Per-task failures land in the rows; only a missing
/// verifier or a bad configuration stops the batch, and only before it starts.
pub fn run_batch(
    tasks: &[Task],
    cfg: &BatchConfig,
    patterns: &PatternTable,
    providers: Option<&ProviderFactory<'_>>,
) -> Result<BatchReport, BenchError> {
    if tasks.is_empty() {
        return Err(BenchError::Config("no tasks".into()));
    }
    if cfg.mode == BatchMode::Agent && providers.is_none() {
        return Err(BenchError::Config("agent mode needs a provider".into()));
    }
    cfg.agent.validate().map_err(|e| BenchError::Config(e.to_string()))?;
    if let VerifierChoice::Openjml(o) = &cfg.verifier {
        o.resolve_executable().map_err(|e| BenchError::BackendUnavailable(e.to_string()))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let rows: Vec<TaskRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut row = run_task(t, cfg, patterns, providers);
                if cfg.timings {
                    row.wall_ms = Some((start.elapsed().as_secs_f64() * 1e6).round() / 1e3);
                }
                row
            })
            .collect()
    });
    Ok(BatchReport {
        schema_version: BATCH_SCHEMA_VERSION,
        mode: cfg.mode,
        fingerprint: cfg.fingerprint(),
        aggregates: aggregate(&rows),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(cat: Category, status: VerifierStatus, mvr: bool) -> TaskRow {
        let t = Task { id: "t".into(), category: cat, source: String::new(), method_name: "m".into(), suite_path: PathBuf::new() };
        TaskRow { meaningfully_verified: mvr, ..TaskRow::new(&t, status) }
    }

    #[test]
    fn four_task_example() {
        use VerifierStatus::*;
        let rows = vec![
            row(Category::Branch, Verified, true),
            row(Category::Branch, Verified, false),
            row(Category::Nested, Failed, false),
            row(Category::Nested, Verified, true),
        ];
        let a = aggregate(&rows);
        assert_eq!((a[0].vr, a[0].mvr), (75.0, 50.0));
        assert_eq!(a[0].mvr_of_verified.map(|x| format!("{x:.1}")), Some("66.7".into()));
        assert_eq!(a.iter().skip(1).map(|x| x.tasks).sum::<usize>(), 4);
        assert_eq!(a.iter().map(|x| x.slice.as_str()).collect::<Vec<_>>(), ["all", "branch", "nested"]);
    }

    #[test]
    fn unverified_flags_never_count() {
        let a = aggregate(&[row(Category::Sequential, VerifierStatus::Failed, true)]);
        assert_eq!(a[0].mvr, 0.0);
        assert!(a[0].mvr <= a[0].vr);
    }

    #[test]
    fn fingerprint_ignores_workers_only() {
        let a = BatchConfig::default();
        let b = BatchConfig { workers: 8, ..a.clone() };
        let c = BatchConfig { normalize: false, ..a.clone() };
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn modes_parse() {
        assert_eq!("agent".parse::<BatchMode>(), Ok(BatchMode::Agent));
        assert!("fast".parse::<BatchMode>().is_err());
    }
}
