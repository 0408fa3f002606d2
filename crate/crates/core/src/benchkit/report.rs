use std::path::{Path, PathBuf};

use super::{Aggregate, BatchReport, BenchError};

pub const REPORT_JSON: &str = "report.json";
pub const TASKS_CSV: &str = "tasks.csv";
pub const SUMMARY_CSV: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// The full report as `report.json`.
    Json,
    /// `tasks.csv` with one row per task and `summary.csv` with the aggregates.
    Csv,
}

const TASK_COLUMNS: [&str; 12] = [
    "id", "category", "status", "postCorr", "postComp", "preCorr", "preComp", "mvr", "agentOutcome", "agentSteps", "error",
    "wallMs",
];

fn score(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_default()
}

fn pct(x: f64) -> String {
    format!("{x:.1}")
}

fn to_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn tasks_csv(r: &BatchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TASK_COLUMNS).expect("in-memory write");
    for row in &r.rows {
        w.write_record([
            row.id.clone(),
            row.category.to_string(),
            row.status.to_string(),
            score(row.post_corr),
            score(row.post_comp),
            score(row.pre_corr),
            score(row.pre_comp),
            row.meaningfully_verified.to_string(),
            row.agent_outcome.map(|o| format!("{o:?}")).unwrap_or_default(),
            row.agent_steps.map(|n| n.to_string()).unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
            row.wall_ms.map(|ms| format!("{ms:.3}")).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    to_string(w)
}

/// `metric,value` rows. Overall rates use bare names (`VR,75.0`); category
/// rates carry the category in brackets (`VR[branch],50.0`).
pub fn summary_csv(r: &BatchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "value"]).expect("in-memory write");
    let mut put = |k: String, v: String| w.write_record([k, v]).expect("in-memory write");
    for a in &r.aggregates {
        let name = |m: &str| if a.slice == "all" { m.to_string() } else { format!("{m}[{}]", a.slice) };
        let Aggregate { tasks, verified, meaningfully_verified, vr, mvr, mvr_of_verified, .. } = a;
        put(name("tasks"), tasks.to_string());
        put(name("verified"), verified.to_string());
        put(name("meaningfully_verified"), meaningfully_verified.to_string());
        put(name("VR"), pct(*vr));
        put(name("MVR"), pct(*mvr));
        put(name("MVR_of_verified"), mvr_of_verified.map(pct).unwrap_or_default());
    }
    put("fingerprint".into(), r.fingerprint.clone());
    to_string(w)
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, BenchError> {
    std::fs::write(&path, text).map_err(|e| BenchError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok(path)
}

/// Writes the requested formats into `dir`, creating it if needed, and
/// returns the written paths.
pub fn emit_report(r: &BatchReport, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    let mut out = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => {
                let mut json = serde_json::to_string_pretty(r).expect("report serializes");
                json.push('\n');
                out.push(write(dir.join(REPORT_JSON), &json)?);
            }
            ReportFormat::Csv => {
                out.push(write(dir.join(TASKS_CSV), &tasks_csv(r))?);
                out.push(write(dir.join(SUMMARY_CSV), &summary_csv(r))?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchkit::{aggregate, BatchMode, Category, TaskRow};
    use crate::verify::VerifierStatus;

    fn report() -> BatchReport {
        let row = |id: &str, status, mvr| TaskRow {
            id: id.into(),
            category: Category::Branch,
            status,
            post_corr: Some(1.0),
            post_comp: Some(2.0 / 3.0),
            pre_corr: None,
            pre_comp: None,
            meaningfully_verified: mvr,
            agent_outcome: None,
            agent_steps: None,
            error: None,
            wall_ms: None,
        };
        let rows = vec![
            row("a", VerifierStatus::Verified, true),
            row("b", VerifierStatus::Verified, false),
            row("c", VerifierStatus::Failed, false),
            row("d, quoted", VerifierStatus::Verified, true),
        ];
        BatchReport { schema_version: 1, mode: BatchMode::Harness, fingerprint: "f".into(), aggregates: aggregate(&rows), rows }
    }

    #[test]
    fn summary_rows() {
        let s = summary_csv(&report());
        assert!(s.starts_with("metric,value\ntasks,4\nverified,3\nmeaningfully_verified,2\nVR,75.0\nMVR,50.0\nMVR_of_verified,66.7\n"));
        assert!(s.contains("VR[branch],75.0\n"));
        assert!(s.ends_with("fingerprint,f\n"));
    }

    #[test]
    fn task_rows_quote_and_format() {
        let t = tasks_csv(&report());
        let mut lines = t.lines();
        assert_eq!(lines.next().unwrap(), TASK_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "a,branch,Verified,1.0000,0.6667,,,true,,,,");
        assert!(t.contains("\"d, quoted\",branch"));
    }

    #[test]
    fn emission_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let r = report();
        let paths = emit_report(&r, dir.path(), &[ReportFormat::Json, ReportFormat::Csv]).unwrap();
        let first: Vec<_> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        emit_report(&r, dir.path(), &[ReportFormat::Json, ReportFormat::Csv]).unwrap();
        let second: Vec<_> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        assert_eq!(paths.len(), 3);
    }
}
