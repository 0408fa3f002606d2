use thiserror::Error;

use crate::java::{tokenize, LexError};
use crate::jml::strip_annotations;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    /// `token` is the 0-based index of the first divergent code token.
    #[error("code altered at token {token} (line {line}): expected `{expected}`, found `{found}`")]
    AlteredCode { token: usize, line: u32, expected: String, found: String },
    #[error("{which} source: {error}")]
    Lex { which: &'static str, error: LexError },
}

fn code_tokens(src: &str) -> Result<Vec<(String, u32)>, LexError> {
    let stripped = strip_annotations(src);
    let tokens = tokenize(&stripped)?;
    Ok(tokens
        .iter()
        .filter(|t| !t.is_comment())
        .map(|t| (t.text(&stripped).to_string(), stripped[..t.span.start].matches('\n').count() as u32 + 1))
        .collect())
}

/// Accepts `candidate` iff it is `original` plus or minus JML annotations,
/// comments and whitespace. The reported line refers to the candidate with
/// its annotations stripped.
pub fn guard_code_unaltered(original: &str, candidate: &str) -> Result<(), GuardError> {
    let a = code_tokens(original).map_err(|error| GuardError::Lex { which: "original", error })?;
    let b = code_tokens(candidate).map_err(|error| GuardError::Lex { which: "candidate", error })?;
    let end = || ("<end of file>".to_string(), 0);
    for i in 0..a.len().max(b.len()) {
        let (x, _) = a.get(i).cloned().unwrap_or_else(end);
        let (y, line) = b.get(i).cloned().unwrap_or_else(|| (end().0, b.last().map_or(1, |t| t.1)));
        if x != y {
            return Err(GuardError::AlteredCode { token: i, line, expected: x, found: y });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CC: &str = include_str!("../../tests/fixtures/changecase/ChangeCase.java");

    #[test]
    fn annotations_are_allowed() {
        let bare = strip_annotations(CC);
        assert_eq!(guard_code_unaltered(&bare, CC), Ok(()));
    }

    #[test]
    fn changed_expression_is_caught() {
        let altered = CC.replace("c - 'a' + 'A'", "c + 32");
        assert_ne!(altered, CC);
        match guard_code_unaltered(CC, &altered) {
            Err(GuardError::AlteredCode { expected, found, .. }) => {
                assert_eq!(expected, "-");
                assert_eq!(found, "+");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn layout_and_comments_do_not_matter() {
        let relaid = CC.replace("    ", "\t").replace("{\n", "{ // opened\n");
        assert_eq!(guard_code_unaltered(CC, &relaid), Ok(()));
    }

    #[test]
    fn truncation_and_lex_errors() {
        let cut = &CC[..CC.rfind('}').unwrap()];
        assert!(matches!(guard_code_unaltered(CC, cut), Err(GuardError::AlteredCode { found, .. }) if found == "<end of file>"));
        assert!(matches!(guard_code_unaltered(CC, "class A { String s = \"open; }"), Err(GuardError::Lex { which: "candidate", .. })));
    }
}
