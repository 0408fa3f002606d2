use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

fn veriact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veriact")).args(args).env_remove("VERIACT_OPENJML").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn changecase_harness(extra: &[&str]) -> Output {
    let (java, suite) = (fixture("changecase/ChangeCase.java"), fixture("changecase/cc.suite.json"));
    let mut args = vec!["harness", p(&java), "--suite", p(&suite)];
    args.extend_from_slice(extra);
    veriact(&args)
}

#[test]
fn eval_true_holds() {
    let o = veriact(&["eval", "true"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "Holds\n"));
}

#[test]
fn eval_reports_each_verdict() {
    let o = veriact(&["eval", "c >= 'a' ==> \\result == c - 32", "--env", "c='b'", "--result", "'B'"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "Holds\n"));
    let o = veriact(&["eval", "x > y", "--env", "x=1; y=2"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "Violated\n"));
    let o = veriact(&["eval", "a[3] == 0", "--env", "a={1, 2}"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("EvalError(IndexOutOfBounds)"));
    let o = veriact(&["eval", "x >"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
}

#[test]
fn weak_changecase_contract_is_not_meaningfully_verified() {
    let o = changecase_harness(&[]);
    assert_eq!(code(&o), 1);
    let golden = std::fs::read_to_string(fixture("changecase/cc.report.json")).unwrap();
    assert_eq!(stdout(&o), golden);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["scores"]["postComp"].as_f64().unwrap() < 0.5);
    assert!(stderr(&o).contains("postComp: 0.0500"));
}

#[test]
fn quiet_silences_only_diagnostics() {
    let loud = changecase_harness(&[]);
    let quiet = changecase_harness(&["--quiet"]);
    assert!(!stderr(&loud).is_empty());
    assert!(stderr(&quiet).is_empty());
    assert_eq!(loud.stdout, quiet.stdout);
    assert_eq!(code(&loud), code(&quiet));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("veriact.toml");
    std::fs::write(&cfg, "[mutation]\nmutants_per_output = 2\n").unwrap();
    let mutants = |o: &Output| -> u64 {
        let r: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        r["poolSizes"]["mutants"].as_u64().unwrap()
    };
    assert_eq!(mutants(&changecase_harness(&["--config", p(&cfg)])), 10);
    assert_eq!(mutants(&changecase_harness(&["--config", p(&cfg), "--k", "3"])), 15);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("veriact.toml");
    std::fs::write(&cfg, "[harness]\nbackend = \"builtin\"\nspeed = 3\n").unwrap();
    let o = veriact(&["--config", p(&cfg), "eval", "true"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("speed"));
    assert!(stdout(&o).is_empty());
    let example = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/veriact.example.toml");
    assert_eq!(code(&veriact(&["--config", p(&example), "eval", "true"])), 0);
}

#[test]
fn usage_errors_print_a_synopsis_to_stderr() {
    for args in [&["frobnicate"][..], &["harness"], &["eval"], &[], &["batch", "x.json", "--mode", "fast"]] {
        let o = veriact(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(stdout(&o).is_empty(), "{args:?}");
        assert!(stderr(&o).contains("Usage") || stderr(&o).contains("--help"), "{args:?}");
    }
    let o = veriact(&["harness", "missing.java", "--suite", "missing.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_verifier_exits_3() {
    let java = fixture("changecase/ChangeCase.java");
    let o = Command::new(env!("CARGO_BIN_EXE_veriact"))
        .args(["verify", p(&java), "--backend", "openjml"])
        .env("VERIACT_OPENJML", "/nonexistent/bin/openjml")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("unavailable"));
    let suite = fixture("changecase/cc.suite.json");
    let o = Command::new(env!("CARGO_BIN_EXE_veriact"))
        .args(["harness", p(&java), "--suite", p(&suite), "--backend", "openjml"])
        .env("VERIACT_OPENJML", "/nonexistent/bin/openjml")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn score_of_saved_logs() {
    let score = |name: &str, exit: &str| {
        let o = veriact(&["score", p(&fixture(&format!("logs/{name}.log"))), "--exit-code", exit]);
        assert_eq!(code(&o), 0);
        stdout(&o)
    };
    assert_eq!(score("verified", "0"), "1.0\n");
    assert_eq!(score("postcondition", "1"), "0.3\n");
    assert_eq!(score("two_proofs", "1"), "0.1\n");
    assert_eq!(score("syntax", "1"), "0.0\n");
}

#[test]
fn builtin_verify_needs_a_suite_and_accepts_changecase() {
    let java = fixture("changecase/ChangeCase.java");
    assert_eq!(code(&veriact(&["verify", p(&java)])), 2);
    let o = veriact(&["verify", p(&java), "--suite", p(&fixture("changecase/cc.suite.json"))]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["status"], "Verified");
}

#[test]
fn parse_mutate_normalize_and_version() {
    let java = fixture("changecase/ChangeCase.java");
    let o = veriact(&["parse", p(&java)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("method char changeCase(char c)\nrequires[0]: "));

    let o = veriact(&["mutate", "5", "--k", "4"]);
    assert_eq!(stdout(&o), "6\n4\n16\n-5\n");
    assert_eq!(code(&veriact(&["mutate", "null"])), 1);

    let o = veriact(&["normalize", p(&java)]);
    assert!(stdout(&o).starts_with("public class Solution {"));
    assert!(stdout(&o).contains("solve"));

    let o = veriact(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("harness report schema 1") && stdout(&o).contains("pattern table "));
}

#[test]
fn agent_runs_are_reproducible_and_exit_by_outcome() {
    let java = fixture("changecase/ChangeCase.java");
    let suite = fixture("changecase/cc.suite.json");
    let run = |script: &str| {
        let s = fixture(&format!("agent/{script}.script.json"));
        veriact(&["agent", p(&java), "--suite", p(&suite), "--provider", "scripted", "--script", p(&s)])
    };
    let (a, b) = (run("complete"), run("complete"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let t: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(t["outcome"], "Completed");
    assert_eq!(t["steps"].as_array().unwrap().len(), 5);
    assert_eq!(code(&run("vacuous")), 1);
    assert_eq!(code(&run("altered")), 1);
    let o = veriact(&["agent", p(&java), "--suite", p(&suite)]);
    assert_eq!(code(&o), 2, "scripted provider without a script");
}

#[test]
fn batch_writes_the_golden_reports() {
    let manifest = fixture("minibench/tasks.json");
    let out = tempfile::tempdir().unwrap();
    let o = veriact(&["batch", p(&manifest), "--mode", "harness", "--workers", "3", "--out", p(out.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["summary.csv", "tasks.csv", "report.json"] {
        let golden = std::fs::read_to_string(fixture(&format!("minibench/golden/{name}"))).unwrap();
        assert_eq!(std::fs::read_to_string(out.path().join(name)).unwrap(), golden, "{name}");
    }
    let a = veriact(&["batch", p(&manifest), "--mode", "classify"]);
    let b = veriact(&["batch", p(&manifest), "--mode", "classify", "--workers", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
