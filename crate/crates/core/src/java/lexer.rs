use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommentKind {
    Line,
    Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Char,
    Str,
    Punct,
    Comment { kind: CommentKind, jml: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
}

impl Token {
    pub fn text<'s>(&self, src: &'s str) -> &'s str {
        &src[self.span.clone()]
    }

    pub fn is_comment(&self) -> bool {
        matches!(self.kind, TokenKind::Comment { .. })
    }

    pub fn is_jml(&self) -> bool {
        matches!(self.kind, TokenKind::Comment { jml: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at byte {position}: {message}")]
pub struct LexError {
    pub position: usize,
    pub message: String,
}

// Longest first.
const PUNCTS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
];

/// Splits Java source into tokens. Whitespace is dropped; comments are kept
/// as tokens so callers can decide whether they matter.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if src[i..].starts_with("//") {
            let jml = bytes.get(i + 2) == Some(&b'@');
            i = src[i..].find('\n').map_or(bytes.len(), |n| i + n);
            TokenKind::Comment { kind: CommentKind::Line, jml }
        } else if src[i..].starts_with("/*") {
            let jml = bytes.get(i + 2) == Some(&b'@');
            match src[i + 2..].find("*/") {
                Some(n) => i = i + 2 + n + 2,
                None => return Err(err(start, "unterminated block comment")),
            }
            TokenKind::Comment { kind: CommentKind::Block, jml }
        } else if src[i..].starts_with("\"\"\"") {
            match src[i + 3..].find("\"\"\"") {
                Some(n) => i = i + 3 + n + 3,
                None => return Err(err(start, "unterminated text block")),
            }
            TokenKind::Str
        } else if c == b'"' || c == b'\'' {
            i = scan_quoted(src, i, c)?;
            if c == b'"' {
                TokenKind::Str
            } else {
                TokenKind::Char
            }
        } else if c.is_ascii_digit()
            || (c == b'.' && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            i = scan_number(bytes, i);
            TokenKind::Number
        } else if is_ident_start(src, i) {
            while i < bytes.len() && is_ident_part(src, i) {
                i += char_len(src, i);
            }
            TokenKind::Ident
        } else if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            i += p.len();
            TokenKind::Punct
        } else if c.is_ascii() {
            i += 1;
            TokenKind::Punct
        } else {
            return Err(err(i, &format!("unexpected character {:?}", src[i..].chars().next().unwrap())));
        };
        out.push(Token { kind, span: start..i });
    }
    Ok(out)
}

fn err(position: usize, message: &str) -> LexError {
    LexError { position, message: message.to_string() }
}

fn char_len(src: &str, i: usize) -> usize {
    src[i..].chars().next().map_or(1, char::len_utf8)
}

fn is_ident_start(src: &str, i: usize) -> bool {
    src[i..].chars().next().is_some_and(|ch| ch == '_' || ch == '$' || ch.is_alphabetic())
}

fn is_ident_part(src: &str, i: usize) -> bool {
    src[i..].chars().next().is_some_and(|ch| ch == '_' || ch == '$' || ch.is_alphanumeric())
}

fn scan_quoted(src: &str, start: usize, quote: u8) -> Result<usize, LexError> {
    let bytes = src.as_bytes();
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => break,
            b if b == quote => return Ok(i + 1),
            _ => i += 1,
        }
    }
    Err(err(start, "unterminated literal"))
}

fn scan_number(bytes: &[u8], start: usize) -> usize {
    let hex = bytes[start] == b'0' && matches!(bytes.get(start + 1), Some(b'x' | b'X'));
    let mut i = start;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' {
            let exponent = if hex { matches!(b, b'p' | b'P') } else { matches!(b, b'e' | b'E') };
            i += 1;
            if exponent && matches!(bytes.get(i), Some(b'+' | b'-')) {
                i += 1;
            }
        } else {
            break;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        tokenize(src).unwrap().iter().map(|t| t.text(src)).collect()
    }

    #[test]
    fn splits_operators_longest_first() {
        assert_eq!(texts("a>>>=b>>c"), vec!["a", ">>>=", "b", ">>", "c"]);
        assert_eq!(texts("x<=y&&!z"), vec!["x", "<=", "y", "&&", "!", "z"]);
    }

    #[test]
    fn recognizes_jml_comments() {
        let src = "//@ requires x > 0;\n/* plain */ /*@ ensures true; @*/ int f;";
        let toks = tokenize(src).unwrap();
        let jml: Vec<bool> = toks.iter().filter(|t| t.is_comment()).map(Token::is_jml).collect();
        assert_eq!(jml, vec![true, false, true]);
    }

    #[test]
    fn comment_markers_inside_strings_are_not_comments() {
        let src = r#"String s = "//@ not a comment"; char q = '\'';"#;
        let toks = tokenize(src).unwrap();
        assert!(toks.iter().all(|t| !t.is_comment()));
        assert_eq!(toks[3].text(src), r#""//@ not a comment""#);
        assert_eq!(toks[8].text(src), r"'\''");
    }

    #[test]
    fn numbers_with_exponents_and_suffixes() {
        assert_eq!(texts("1.5e-3+0x1Fp+2-10L"), vec!["1.5e-3", "+", "0x1Fp+2", "-", "10L"]);
    }

    #[test]
    fn unterminated_comment_is_an_error() {
        let e = tokenize("int x; /* open").unwrap_err();
        assert_eq!(e.position, 7);
    }
}
