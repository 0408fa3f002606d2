use regex::Regex;
use thiserror::Error;

use crate::java::{tokenize, LexError, TokenKind};
use crate::jml::contract::{find_method_declarations, top_level_type_names};

pub const NORMALIZED_CLASS: &str = "Solution";
pub const NORMALIZED_METHOD: &str = "solve";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("expected exactly one {what}, found {count}")]
    AmbiguousDeclaration { what: String, count: usize },
    #[error("`{0}` already names something else in the file")]
    RenameCollision(String),
    #[error(transparent)]
    Lex(#[from] LexError),
}

/// `source` with its only top-level type renamed to `Solution` and `method`
/// to `solve`. Identifiers in code and in JML comments are renamed; strings
/// and ordinary comments are kept.
pub fn normalize_source(source: &str, method: &str) -> Result<String, NormalizeError> {
    let tokens = tokenize(source)?;
    let classes = top_level_type_names(source, &tokens);
    let [(_, class)] = classes.as_slice() else {
        return Err(NormalizeError::AmbiguousDeclaration { what: "top-level type".into(), count: classes.len() });
    };
    let decls = find_method_declarations(source, &tokens, method).len();
    if decls != 1 {
        return Err(NormalizeError::AmbiguousDeclaration { what: format!("declaration of method `{method}`"), count: decls });
    }
    let idents = || tokens.iter().filter(|t| t.kind == TokenKind::Ident).map(|t| t.text(source));
    for (old, new) in [(class.as_str(), NORMALIZED_CLASS), (method, NORMALIZED_METHOD)] {
        if old != new && idents().any(|w| w == new) {
            return Err(NormalizeError::RenameCollision(new.into()));
        }
    }
    if class == NORMALIZED_CLASS && method == NORMALIZED_METHOD {
        return Ok(source.to_string());
    }

    let rename = |w: &str| -> Option<&'static str> {
        if w == class {
            Some(NORMALIZED_CLASS)
        } else if w == method {
            Some(NORMALIZED_METHOD)
        } else {
            None
        }
    };
    // JML keywords such as `\max` never match.
    let words = Regex::new(&format!(r"(^|[^\\\w])({}|{})\b", regex::escape(class), regex::escape(method))).expect("escaped words");
    let mut out = String::with_capacity(source.len());
    let mut cursor = 0;
    for t in &tokens {
        let text = t.text(source);
        let replacement = match &t.kind {
            TokenKind::Ident => rename(text).map(str::to_string),
            TokenKind::Comment { jml: true, .. } => {
                Some(words.replace_all(text, |c: &regex::Captures| format!("{}{}", &c[1], rename(&c[2]).unwrap_or_default())).into_owned())
            }
            _ => None,
        };
        if let Some(r) = replacement {
            out.push_str(&source[cursor..t.span.start]);
            out.push_str(&r);
            cursor = t.span.end;
        }
    }
    out.push_str(&source[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CC: &str = include_str!("../../tests/fixtures/changecase/ChangeCase.java");

    #[test]
    fn change_case_becomes_solution_solve() {
        let out = normalize_source(CC, "changeCase").unwrap();
        assert!(out.starts_with("public class Solution {"));
        assert!(out.contains("public char solve (char c) {"));
        assert!(!out.contains("changeCase") && !out.contains("ChangeCase"));
        assert_eq!(normalize_source(&out, "solve").unwrap(), out);
    }

    #[test]
    fn recursion_constructors_and_contracts_follow() {
        let src = "class Fact {\n  Fact() {}\n  //@ ensures \\result >= 1 && (n > 0 ==> \\result == n * fact(n - 1));\n  static int fact(int n) { return n <= 1 ? 1 : n * fact(n - 1); }\n  Fact self() { return new Fact(); }\n}\n";
        let out = normalize_source(src, "fact").unwrap();
        assert_eq!(
            out,
            "class Solution {\n  Solution() {}\n  //@ ensures \\result >= 1 && (n > 0 ==> \\result == n * solve(n - 1));\n  static int solve(int n) { return n <= 1 ? 1 : n * solve(n - 1); }\n  Solution self() { return new Solution(); }\n}\n"
        );
    }

    #[test]
    fn strings_and_plain_comments_are_untouched() {
        let src = "class A { // A calls f\n  String f(int x) { return \"f of A\"; }\n}\n";
        let out = normalize_source(src, "f").unwrap();
        assert_eq!(out, "class Solution { // A calls f\n  String solve(int x) { return \"f of A\"; }\n}\n");
    }

    #[test]
    fn jml_keywords_are_not_identifiers() {
        let src = "class M {\n  //@ ensures \\result == (\\max int i; 0 <= i && i < a.length; a[i]);\n  int max(int[] a) { return 0; }\n}\n";
        let out = normalize_source(src, "max").unwrap();
        assert!(out.contains("(\\max int i;"));
        assert!(out.contains("int solve(int[] a)"));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            normalize_source("class A { int f() { return 1; } }\nclass B {}", "f"),
            Err(NormalizeError::AmbiguousDeclaration { count: 2, .. })
        ));
        assert!(matches!(
            normalize_source("class A { int f() { return 1; } int f(int x) { return x; } }", "f"),
            Err(NormalizeError::AmbiguousDeclaration { count: 2, .. })
        ));
        assert!(matches!(
            normalize_source("class A { int f() { return solve(); } int solve() { return 1; } }", "f"),
            Err(NormalizeError::RenameCollision(_))
        ));
        assert!(matches!(normalize_source("class A { int g() { return 1; } }", "f"), Err(NormalizeError::AmbiguousDeclaration { count: 0, .. })));
    }
}
