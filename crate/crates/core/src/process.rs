//! Child processes with a wall-clock limit.

use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;
use wait_timeout::ChildExt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Captured {
    /// `None` when the process was killed by a signal.
    pub code: Option<i32>,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

impl Captured {
    pub fn success(&self) -> bool {
        self.code == Some(0)
    }

    /// stdout followed by stderr.
    pub fn combined(&self) -> String {
        let mut s = self.stdout.clone();
        if !s.is_empty() && !s.ends_with('\n') && !self.stderr.is_empty() {
            s.push('\n');
        }
        s.push_str(&self.stderr);
        s
    }
}

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("cannot start `{program}`: {source}")]
    Spawn { program: String, source: std::io::Error },
    #[error("`{program}` exceeded {limit:?}")]
    Timeout { program: String, limit: Duration },
    #[error("waiting on `{program}`: {source}")]
    Wait { program: String, source: std::io::Error },
}

/// Runs `cmd` to completion or kills it after `limit`. Both output streams
/// are drained on helper threads so a chatty child cannot block.
pub fn run_with_timeout(cmd: &mut Command, limit: Duration) -> Result<Captured, ProcessError> {
    let program = cmd.get_program().to_string_lossy().into_owned();
    let start = Instant::now();
    let mut child = cmd
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| ProcessError::Spawn { program: program.clone(), source })?;
    let drain = |mut r: Box<dyn Read + Send>| {
        thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = r.read_to_end(&mut buf);
            String::from_utf8_lossy(&buf).into_owned()
        })
    };
    let out = drain(Box::new(child.stdout.take().expect("piped stdout")));
    let err = drain(Box::new(child.stderr.take().expect("piped stderr")));
    let status = child.wait_timeout(limit).map_err(|source| ProcessError::Wait { program: program.clone(), source })?;
    match status {
        Some(status) => Ok(Captured {
            code: status.code(),
            stdout: out.join().unwrap_or_default(),
            stderr: err.join().unwrap_or_default(),
            elapsed: start.elapsed(),
        }),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            // Grandchildren may still hold the pipes open, so the drain
            // threads are detached rather than joined.
            drop((out, err));
            Err(ProcessError::Timeout { program, limit })
        }
    }
}

#[cfg(all(test, unix))]
mod tests {
    use super::*;

    #[test]
    fn captures_output_and_exit_code() {
        let c = run_with_timeout(Command::new("sh").args(["-c", "echo out; echo err >&2; exit 3"]), Duration::from_secs(5)).unwrap();
        assert_eq!(c.code, Some(3));
        assert_eq!(c.stdout, "out\n");
        assert_eq!(c.stderr, "err\n");
    }

    #[test]
    fn kills_on_timeout() {
        let r = run_with_timeout(Command::new("sh").args(["-c", "sleep 5"]), Duration::from_millis(100));
        assert!(matches!(r, Err(ProcessError::Timeout { .. })));
    }

    #[test]
    fn missing_program() {
        let r = run_with_timeout(&mut Command::new("/nonexistent/tool"), Duration::from_secs(1));
        assert!(matches!(r, Err(ProcessError::Spawn { .. })));
    }
}
