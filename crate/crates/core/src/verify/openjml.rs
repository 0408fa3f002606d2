use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::patterns::{classify_output, PatternTable};
use super::{VerifierResult, VerifierStatus, VerifyError};
use crate::java::tokenize;
use crate::jml::contract::top_level_type_names;
use crate::process::{run_with_timeout, Captured, ProcessError};

/// Environment variable overriding the verifier executable.
pub const OPENJML_ENV: &str = "VERIACT_OPENJML";

/// Invocation: `<executable> <mode_flags...> <extra_flags...> <File.java>`,
/// run inside a fresh temporary directory holding only that file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", default, deny_unknown_fields)]
pub struct OpenJmlConfig {
    pub executable: PathBuf,
    pub mode_flags: Vec<String>,
    pub extra_flags: Vec<String>,
    pub timeout_secs: u64,
    /// Concurrent verifier processes.
    pub parallelism: usize,
}

impl Default for OpenJmlConfig {
    fn default() -> Self {
        OpenJmlConfig {
            executable: PathBuf::from("openjml"),
            mode_flags: vec!["-esc".into()],
            extra_flags: vec![],
            timeout_secs: 300,
            parallelism: 1,
        }
    }
}

impl OpenJmlConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// The environment override wins over the configured path; bare names
    /// are looked up on `PATH`.
    pub fn resolve_executable(&self) -> Result<PathBuf, VerifyError> {
        let configured = std::env::var_os(OPENJML_ENV).map(PathBuf::from).unwrap_or_else(|| self.executable.clone());
        if configured.components().count() > 1 {
            return if configured.is_file() {
                Ok(configured)
            } else {
                Err(VerifyError::BackendUnavailable(format!("{} does not exist", configured.display())))
            };
        }
        which::which(&configured)
            .map_err(|_| VerifyError::BackendUnavailable(format!("`{}` not found on PATH", configured.display())))
    }
}

/// Runs the verifier on `file` with `dir` as working directory.
pub fn run_openjml(cfg: &OpenJmlConfig, dir: &Path, file: &Path) -> Result<Captured, VerifyError> {
    let exe = cfg.resolve_executable()?;
    let mut cmd = Command::new(exe);
    cmd.current_dir(dir).args(&cfg.mode_flags).args(&cfg.extra_flags).arg(file);
    run_with_timeout(&mut cmd, cfg.timeout()).map_err(|e| match e {
        ProcessError::Spawn { .. } => VerifyError::BackendUnavailable(e.to_string()),
        other => VerifyError::Io(other.to_string()),
    })
}

/// File name Java requires for `source`: its public top-level class.
pub(crate) fn java_file_name(source: &str) -> String {
    let fallback = || "Main.java".to_string();
    let Ok(tokens) = tokenize(source) else { return fallback() };
    let types = top_level_type_names(source, &tokens);
    let public = types.iter().find(|(idx, _)| {
        // `public` among the few tokens before `class Name`.
        tokens[idx.saturating_sub(4)..*idx].iter().any(|t| t.text(source) == "public")
    });
    public.or(types.first()).map(|(_, n)| format!("{n}.java")).unwrap_or_else(fallback)
}

pub fn verify_with_openjml(source: &str, cfg: &OpenJmlConfig, patterns: &PatternTable) -> Result<VerifierResult, VerifyError> {
    let exe = cfg.resolve_executable()?;
    let dir = tempfile::tempdir().map_err(|e| VerifyError::Io(e.to_string()))?;
    let file = PathBuf::from(java_file_name(source));
    std::fs::write(dir.path().join(&file), source).map_err(|e| VerifyError::Io(e.to_string()))?;
    let mut cmd = Command::new(exe);
    cmd.current_dir(dir.path()).args(&cfg.mode_flags).args(&cfg.extra_flags).arg(&file);
    match run_with_timeout(&mut cmd, cfg.timeout()) {
        Ok(out) => {
            let log = out.combined();
            let (es, ev) = classify_output(&log, out.code, patterns);
            let mut r = VerifierResult::from_classified(es, ev, out.code, log);
            r.elapsed_ms = out.elapsed.as_millis() as u64;
            Ok(r)
        }
        Err(ProcessError::Timeout { limit, .. }) => {
            let mut r = VerifierResult::with_status(VerifierStatus::Timeout, format!("verifier exceeded {limit:?}"));
            r.elapsed_ms = limit.as_millis() as u64;
            Ok(r)
        }
        Err(e @ ProcessError::Spawn { .. }) => Err(VerifyError::BackendUnavailable(e.to_string())),
        Err(e) => Ok(VerifierResult::with_status(VerifierStatus::ToolError, e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_name_follows_public_class() {
        assert_eq!(java_file_name("class A {}\npublic final class B {}"), "B.java");
        assert_eq!(java_file_name("class A {}"), "A.java");
        assert_eq!(java_file_name("/* nothing */"), "Main.java");
    }

    #[test]
    fn missing_executable_is_unavailable() {
        let cfg = OpenJmlConfig { executable: "/nonexistent/openjml".into(), ..OpenJmlConfig::default() };
        if std::env::var_os(OPENJML_ENV).is_none() {
            assert!(matches!(cfg.resolve_executable(), Err(VerifyError::BackendUnavailable(_))));
        }
    }

    #[cfg(unix)]
    #[test]
    fn runs_a_fake_verifier_script() {
        use std::os::unix::fs::PermissionsExt;
        if std::env::var_os(OPENJML_ENV).is_some() {
            return;
        }
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("fake-openjml");
        std::fs::write(
            &script,
            "#!/bin/sh\necho \"$2:5: verify: The prover cannot establish an assertion (Postcondition: $2:3:) in method f\"\nexit 1\n",
        )
        .unwrap();
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let cfg = OpenJmlConfig { executable: script, ..OpenJmlConfig::default() };
        let r = verify_with_openjml("public class A { //@ ensures \\result > 0;\n int f() { return 0; } }", &cfg, &PatternTable::builtin()).unwrap();
        assert_eq!(r.status, VerifierStatus::Failed);
        assert_eq!(r.verification_errors.len(), 1);
        assert!(r.raw_log.contains("A.java:5"));
    }
}
