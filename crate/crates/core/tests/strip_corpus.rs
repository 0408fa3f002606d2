//! Annotation stripping over a 50-file corpus: the Java fixtures plus
//! generated sources mixing every annotation placement the lexer knows.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use veriact_core::java::tokenize;
use veriact_core::jml::strip_annotations;

fn java_files(dir: &Path, out: &mut Vec<String>) {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            java_files(&p, out);
        } else if p.extension().is_some_and(|x| x == "java") {
            out.push(std::fs::read_to_string(&p).unwrap());
        }
    }
}

fn annotation(rng: &mut ChaCha8Rng, indent: &str) -> String {
    match rng.gen_range(0..7) {
        0 => String::new(),
        1 => format!("{indent}//@ requires n >= 0;\n"),
        2 => format!("{indent}/*@ requires n > 0;\n{indent}  @ ensures \\result >= n;\n{indent}  @*/\n"),
        3 => format!("{indent}//@ ensures \\result == n; // trailing note\n{indent}/*@ pure @*/\n"),
        4 => format!("{indent}// plain comment with @ sign\n{indent}//@ ensures (\\forall int i; 0 <= i && i < n; i >= 0);\n"),
        5 => format!("{indent}/* ordinary block */ /*@ requires true; @*/\n"),
        _ => format!("{indent}/*@ requires n != 3; // nested line comment\n{indent}  @ ensures true; @*/\n"),
    }
}

fn generated(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut src = format!("public class Gen{seed} {{\n");
    if rng.gen_bool(0.5) {
        src.push_str("    /*@ spec_public @*/ private int field = 1;\n");
    }
    for m in 0..rng.gen_range(1..4) {
        src.push_str(&annotation(&mut rng, "    "));
        let modifiers = if rng.gen_bool(0.3) { "public /*@ pure @*/ static" } else { "public static" };
        src.push_str(&format!("    {modifiers} int m{m}(int n) {{\n"));
        src.push_str("        String s = \"//@ not an annotation\"; char at = '@';\n");
        if rng.gen_bool(0.5) {
            src.push_str("        int k = n; //@ assert k == n;\n");
        }
        if rng.gen_bool(0.5) {
            src.push_str("        //@ maintaining 0 <= n;\n        while (n > 100) { n--; }\n");
        }
        src.push_str("        return n /* keep */ + s.length() - at;\n    }\n");
    }
    src.push_str("}\n");
    src
}

fn code_words(src: &str) -> Vec<String> {
    tokenize(src).unwrap().iter().filter(|t| !t.is_jml()).map(|t| t.text(src).to_string()).collect()
}

#[test]
fn stripping_is_idempotent_and_removes_only_jml() {
    let mut corpus = Vec::new();
    java_files(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"), &mut corpus);
    let fixtures = corpus.len();
    corpus.extend((0..(50 - fixtures as u64)).map(generated));
    assert_eq!(corpus.len(), 50);

    let mut removed = 0;
    for (i, src) in corpus.iter().enumerate() {
        let once = strip_annotations(src);
        assert_eq!(strip_annotations(&once), once, "file {i}");
        assert!(tokenize(&once).unwrap().iter().all(|t| !t.is_jml()), "file {i}: JML left after stripping");
        assert_eq!(code_words(src), code_words(&once), "file {i}: non-JML tokens changed");
        removed += usize::from(once != *src);
    }
    assert!(removed >= 40, "only {removed} files carried annotations");
}
