//! Every `tests/fixtures/logs/<case>.log` is classified with the bundled
//! pattern table and compared with the hand-checked `<case>.expected.json`.

use std::path::PathBuf;

use serde::Deserialize;
use veriact_core::verify::{classify_output, graduated_score, ErrorCategory, PatternTable, VerifierResult, VerifierStatus};

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Expected {
    exit_code: i32,
    status: VerifierStatus,
    syntax_errors: Vec<(u32, ErrorCategory)>,
    verification_errors: Vec<(u32, ErrorCategory)>,
    score: f64,
}

#[test]
fn golden_logs_classify_as_recorded() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/logs");
    let mut cases: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "log"))
        .collect();
    cases.sort();
    assert!(cases.len() >= 10, "{} logs", cases.len());
    let table = PatternTable::builtin();
    for log in cases {
        let name = log.file_stem().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&log).unwrap();
        let expected: Expected =
            serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.expected.json"))).unwrap()).unwrap();

        let (es, ev) = classify_output(&text, Some(expected.exit_code), &table);
        let pairs = |v: &[veriact_core::verify::ClassifiedError]| -> Vec<(u32, ErrorCategory)> {
            v.iter().map(|e| (e.source_line.expect("line"), e.category)).collect()
        };
        assert_eq!(pairs(&es), expected.syntax_errors, "{name}: syntax errors");
        assert_eq!(pairs(&ev), expected.verification_errors, "{name}: verification errors");
        let r = VerifierResult::from_classified(es, ev, Some(expected.exit_code), text);
        assert_eq!(r.status, expected.status, "{name}: status");
        assert_eq!(graduated_score(&r).0, expected.score, "{name}: score");
    }
}
