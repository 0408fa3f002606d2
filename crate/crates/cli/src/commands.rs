use std::path::{Path, PathBuf};

use tracing::{info, warn};
use veriact_core::agent::{
    run_veriact, AgentError, AgentTask, ChatProvider, HttpProvider, Outcome, ProviderError, ScriptedProvider,
};
use veriact_core::benchkit::{
    emit_report, load_manifest, normalize_source, run_batch, BatchConfig, BatchMode, BenchError, ReportFormat, Task,
    VerifierChoice,
};
use veriact_core::harness::{spec_harness_report, HarnessBackend, HarnessError, HarnessOptions};
use veriact_core::jml::contract::find_annotated_method;
use veriact_core::jml::{evaluate, extract_contract, parse_expression, strip_annotations, Env, EvalOptions, Verdict};
use veriact_core::testkit::{mutate_output, parse_value_literal, TestSuite};
use veriact_core::verify::{
    classify_output, graduated_score, verify_annotated, BuiltinVerifier, VerifierBackend, VerifierResult,
    VerifierStatus, VerifyError,
};

use crate::config::{BackendKind, GlobalConfig, ProviderKind};
use crate::{Command, EXIT_BACKEND, EXIT_FAILURES, EXIT_OK, EXIT_USAGE};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl ToString) -> CliError {
    CliError { code: EXIT_USAGE, message: message.to_string() }
}

fn failure(message: impl ToString) -> CliError {
    CliError { code: EXIT_FAILURES, message: message.to_string() }
}

fn unavailable(message: impl ToString) -> CliError {
    CliError { code: EXIT_BACKEND, message: message.to_string() }
}

fn exit_if(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILURES
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_suite(path: &Path) -> Result<TestSuite, CliError> {
    TestSuite::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Machine output: the file when given, standard output otherwise.
fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn method_or_annotated(method: Option<String>, source: &str) -> Result<String, CliError> {
    match method {
        Some(m) => Ok(m),
        None => find_annotated_method(source).map_err(|e| usage(format!("{e}; pass --method"))),
    }
}

fn harness_backend(kind: BackendKind, cfg: &GlobalConfig) -> HarnessBackend {
    match kind {
        BackendKind::Builtin => HarnessBackend::Builtin(EvalOptions::default()),
        BackendKind::Openjml => HarnessBackend::OpenJml(cfg.verifier.openjml.clone()),
    }
}

fn verifier_backend(kind: BackendKind, cfg: &GlobalConfig, method: &str, suite: Option<TestSuite>) -> Result<VerifierBackend, CliError> {
    let backend = match kind {
        BackendKind::Openjml => VerifierBackend::OpenJml(cfg.verifier.openjml.clone()),
        BackendKind::Builtin => {
            let suite = suite.ok_or_else(|| usage("the builtin verifier needs --suite"))?;
            VerifierBackend::Builtin(BuiltinVerifier::new(method, suite))
        }
    };
    backend.probe().map_err(unavailable)?;
    Ok(backend)
}

fn verify_error(e: VerifyError) -> CliError {
    match e {
        VerifyError::BackendUnavailable(_) => unavailable(e),
        VerifyError::EmptyInput => usage(e),
        VerifyError::Io(_) => failure(e),
    }
}

/// Script for `task_id`: the file itself, or `<dir>/<task_id>.script.json`.
fn script_path(script: &Path, task_id: &str) -> PathBuf {
    if script.is_dir() {
        script.join(format!("{task_id}.script.json"))
    } else {
        script.to_path_buf()
    }
}

fn make_provider(kind: ProviderKind, script: Option<&Path>, cfg: &GlobalConfig, task_id: &str) -> Result<Box<dyn ChatProvider>, ProviderError> {
    match kind {
        ProviderKind::Scripted => {
            let script = script.ok_or_else(|| ProviderError::Config("the scripted provider needs --script".into()))?;
            Ok(Box::new(ScriptedProvider::load(&script_path(script, task_id))?))
        }
        ProviderKind::Http => Ok(Box::new(HttpProvider::new(cfg.provider.http.clone())?)),
    }
}

pub fn run(command: Command, cfg: &GlobalConfig) -> Result<u8, CliError> {
    let patterns = cfg.pattern_table().map_err(usage)?;
    match command {
        Command::Parse { file, method } => {
            let source = read(&file)?;
            let method = method_or_annotated(method, &source)?;
            let x = extract_contract(&source, &method).map_err(failure)?;
            emit(None, &crate::tree::contract_tree(&x.method, &x.contract))?;
            Ok(EXIT_OK)
        }

        Command::Eval { expr, env, result } => {
            let e = parse_expression(&expr).map_err(|err| usage(format!("expression: {err}")))?;
            let mut bindings = Vec::new();
            for item in env.iter().flat_map(|s| s.split(';')).filter(|s| !s.trim().is_empty()) {
                let (name, value) = item.split_once('=').ok_or_else(|| usage(format!("binding `{item}` is not name=value")))?;
                let v = parse_value_literal(value).map_err(|err| usage(format!("binding `{item}`: {err}")))?;
                bindings.push((name.trim().to_string(), v));
            }
            let result = result.map(|r| parse_value_literal(&r).map_err(|err| usage(format!("--result: {err}")))).transpose()?;
            let verdict = evaluate(&e, &Env::harness(bindings, result), &EvalOptions::default());
            emit(None, &format!("{verdict}\n"))?;
            Ok(exit_if(verdict == Verdict::Holds))
        }

        Command::Mutate { value, k, seed } => {
            let v = parse_value_literal(&value).map_err(|e| usage(format!("value: {e}")))?;
            let mut mc = cfg.mutation_config();
            if let Some(k) = k {
                mc.mutants_per_output = k;
            }
            if let Some(seed) = seed {
                mc.seed = seed;
            }
            let mutants = mutate_output(&v, &mc).map_err(failure)?;
            emit(None, &mutants.iter().map(|m| format!("{m}\n")).collect::<String>())?;
            Ok(EXIT_OK)
        }

        Command::Harness { task, suite, backend, method, k, max_pairs, output, timings } => {
            let source = read(&task)?;
            let suite = load_suite(&suite)?;
            let method = method.unwrap_or_else(|| suite.signature.name.clone());
            let x = extract_contract(&source, &method).map_err(failure)?;
            let backend = harness_backend(backend.unwrap_or(cfg.harness.backend), cfg);
            backend.probe().map_err(unavailable)?;
            let mut opts = HarnessOptions {
                mutation: cfg.mutation_config(),
                thresholds: cfg.thresholds(),
                timings: timings || cfg.harness.timings,
                max_pairs,
            };
            if let Some(k) = k {
                opts.mutation.mutants_per_output = k;
            }
            let report = spec_harness_report(&x.contract, &suite, &opts, &backend).map_err(|e| match e {
                HarnessError::BackendUnavailable(_) => unavailable(e),
                HarnessError::Suite(_) => usage(e),
                other => failure(other),
            })?;
            emit(output.as_deref(), &report.to_json_string())?;
            for line in report.score_lines().lines() {
                info!("{line}");
            }
            for w in &report.warnings {
                warn!("pair {}: {}", w.pair_index, w.message);
            }
            info!("meaningfully verified: {}", report.meaningfully_verified);
            Ok(exit_if(report.meaningfully_verified))
        }

        Command::Verify { file, backend, suite, method, output } => {
            let source = read(&file)?;
            let suite = suite.as_deref().map(load_suite).transpose()?;
            let method = match (method, &suite) {
                (Some(m), _) => m,
                (None, Some(s)) => s.signature.name.clone(),
                (None, None) => method_or_annotated(None, &source)?,
            };
            let backend = verifier_backend(backend.unwrap_or(cfg.verifier.backend), cfg, &method, suite)?;
            let result = verify_annotated(&source, &backend, &patterns).map_err(verify_error)?;
            emit(output.as_deref(), &pretty_json(&result))?;
            let (score, feedback) = graduated_score(&result);
            info!("{} (score {score:.1})", result.status);
            for line in feedback.lines() {
                info!("{line}");
            }
            Ok(exit_if(result.status == VerifierStatus::Verified))
        }

        Command::Score { log, exit_code } => {
            let text = read(&log)?;
            let (syntax, verification) = classify_output(&text, Some(exit_code), &patterns);
            let result = VerifierResult::from_classified(syntax, verification, Some(exit_code), text);
            let (score, feedback) = graduated_score(&result);
            emit(None, &format!("{score:.1}\n"))?;
            info!("status: {}", result.status);
            for line in feedback.lines() {
                info!("{line}");
            }
            Ok(EXIT_OK)
        }

        Command::Normalize { file, method, output } => {
            let source = read(&file)?;
            let method = method_or_annotated(method, &source)?;
            let out = normalize_source(&source, &method).map_err(failure)?;
            emit(output.as_deref(), &out)?;
            Ok(EXIT_OK)
        }

        Command::Agent { task, suite, provider, script, backend, method, max_steps, output } => {
            let source = read(&task)?;
            let suite = load_suite(&suite)?;
            let method = method.unwrap_or_else(|| suite.signature.name.clone());
            let id = task.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| method.clone());
            let mut agent_cfg = cfg.agent_config();
            if let Some(n) = max_steps {
                agent_cfg.max_steps = n;
            }
            let verifier = verifier_backend(backend.unwrap_or(cfg.verifier.backend), cfg, &method, Some(suite.clone()))?;
            let harness = harness_backend(cfg.harness.backend, cfg);
            harness.probe().map_err(unavailable)?;
            let script = script.or_else(|| cfg.provider.script.clone());
            let mut chat = make_provider(provider.unwrap_or(cfg.provider.kind), script.as_deref(), cfg, &id).map_err(usage)?;
            let task = AgentTask { id, source: strip_annotations(&source), method };
            let t = run_veriact(&task, &suite, &agent_cfg, chat.as_mut(), &verifier, &harness, &patterns).map_err(|e| match e {
                AgentError::BackendUnavailable(_) => unavailable(e),
                other => usage(other),
            })?;
            emit(output.as_deref(), &t.to_json_string())?;
            info!("{:?} after {} steps: {}", t.outcome, t.steps.len(), t.outcome_detail);
            Ok(exit_if(t.outcome == Outcome::Completed))
        }

        Command::Batch { manifest, mode, out, workers, backend, provider, script } => {
            let tasks = load_manifest(&manifest).map_err(usage)?;
            let bc = BatchConfig {
                mode,
                verifier: match backend.unwrap_or(cfg.verifier.backend) {
                    BackendKind::Builtin => VerifierChoice::Builtin,
                    BackendKind::Openjml => VerifierChoice::Openjml(cfg.verifier.openjml.clone()),
                },
                mutation: cfg.mutation_config(),
                thresholds: cfg.thresholds(),
                agent: cfg.agent_config(),
                normalize: cfg.batch.normalize,
                timings: cfg.batch.timings,
                workers: workers.unwrap_or(cfg.batch.workers),
            };
            let kind = provider.unwrap_or(cfg.provider.kind);
            let script = script.or_else(|| cfg.provider.script.clone());
            let factory = |t: &Task| make_provider(kind, script.as_deref(), cfg, &t.id);
            let providers = (mode == BatchMode::Agent).then_some(&factory as &veriact_core::benchkit::ProviderFactory);
            let report = run_batch(&tasks, &bc, &patterns, providers).map_err(|e| match e {
                BenchError::BackendUnavailable(_) => unavailable(e),
                other => usage(other),
            })?;
            match &out {
                Some(dir) => {
                    let written = emit_report(&report, dir, &[ReportFormat::Json, ReportFormat::Csv]).map_err(usage)?;
                    for p in written {
                        info!("wrote {}", p.display());
                    }
                }
                None => emit(None, &pretty_json(&report))?,
            }
            let all = &report.aggregates[0];
            info!("{} tasks: VR {:.1}, MVR {:.1}", all.tasks, all.vr, all.mvr);
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use veriact_core::testkit::Value;

    #[test]
    fn script_paths_resolve_per_task_inside_directories() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(script_path(dir.path(), "t1"), dir.path().join("t1.script.json"));
        let file = dir.path().join("one.json");
        std::fs::write(&file, "{}").unwrap();
        assert_eq!(script_path(&file, "t1"), file);
    }

    #[test]
    fn builtin_verifier_requires_a_suite() {
        let e = verifier_backend(BackendKind::Builtin, &GlobalConfig::default(), "f", None).unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
    }

    #[test]
    fn value_literals_accept_the_cli_notation() {
        assert_eq!(parse_value_literal("'a'").unwrap(), Value::char('a'));
    }
}
