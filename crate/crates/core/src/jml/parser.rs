use num_bigint::BigInt;
use num_traits::Num;
use thiserror::Error;

use super::ast::{BinaryOp, Expr, PrimType, Quantifier, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected one of [{}], found {found}", expected.join(", "))]
    Syntax { position: usize, expected: Vec<String>, found: String },
    #[error("unsupported JML construct `{construct}` at offset {position}")]
    Unsupported { position: usize, construct: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::Unsupported { position, .. } => *position,
        }
    }

    fn shifted(self, by: usize) -> ParseError {
        match self {
            ParseError::Syntax { position, expected, found } => {
                ParseError::Syntax { position: position + by, expected, found }
            }
            ParseError::Unsupported { position, construct } => {
                ParseError::Unsupported { position: position + by, construct }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Backslash(String),
    Int(BigInt),
    Float(f64),
    Char(u16),
    Str(String),
    Op(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Backslash(s) => format!("`\\{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Float(v) => format!("float `{v}`"),
            Tok::Char(_) => "char literal".into(),
            Tok::Str(_) => "string literal".into(),
            Tok::Op(op) => format!("`{op}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

// Longest first.
const OPS: &[&str] = &[
    "<=!=>", "<==>", ">>>", "<==", "==>", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "(", ")",
    "[", "]", ".", ",", ";", ":", "?", "!", "~", "*", "/", "%", "+", "-", "<", ">", "&", "|", "^",
    "=", "{", "}", "@",
];

// Backslash keywords that belong to JML but not to the supported subset.
const UNSUPPORTED_BACKSLASH: &[&str] = &[
    "sum", "product", "num_of", "max", "min", "fresh", "nonnullelements", "typeof", "type",
    "elemtype", "not_modified", "not_assigned", "only_assigned", "only_called", "nothing",
    "everything", "invariant_for", "reach", "lockset", "duration", "space", "working_space",
    "into", "such_that", "bigint", "real", "exception", "pre", "same", "lblpos", "lblneg",
    "is_initialized", "choose", "let",
];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c == b'\\' {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if i == start + 1 {
                return Err(syntax(start, &["JML keyword after `\\`"], "`\\`"));
            }
            Tok::Backslash(text[start + 1..i].to_string())
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (tok, end) = lex_number(text, i)?;
            i = end;
            tok
        } else if c == b'\'' {
            let (units, end) = lex_quoted(text, i, b'\'')?;
            i = end;
            if units.len() != 1 {
                return Err(syntax(start, &["single character"], "malformed char literal"));
            }
            Tok::Char(units[0])
        } else if c == b'"' {
            let (units, end) = lex_quoted(text, i, b'"')?;
            i = end;
            Tok::Str(String::from_utf16_lossy(&units))
        } else if c == b'_' || c == b'$' || c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if let Some(op) = OPS.iter().find(|op| text[i..].starts_with(**op)) {
            i += op.len();
            Tok::Op(op)
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(syntax(start, &["expression"], &format!("character {ch:?}")));
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

fn syntax(position: usize, expected: &[&str], found: &str) -> ParseError {
    ParseError::Syntax {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.to_string(),
    }
}

fn lex_number(text: &str, start: usize) -> Result<(Tok, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut i = start;
    let hex = bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X'));
    let binary = bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'b' | b'B'));
    if hex || binary {
        i += 2;
    }
    let mut is_float = false;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_digit() || b == b'_' || (hex && b.is_ascii_hexdigit()) {
            i += 1;
        } else if !hex && !binary && b == b'.' && !is_float {
            // `1..2` is not a thing, but `a[1].length` must not eat the dot.
            if bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic() && !matches!(n, b'e' | b'E' | b'd' | b'D' | b'f' | b'F')) {
                break;
            }
            is_float = true;
            i += 1;
        } else if !hex && !binary && matches!(b, b'e' | b'E') {
            is_float = true;
            i += 1;
            if matches!(bytes.get(i), Some(b'+' | b'-')) {
                i += 1;
            }
        } else {
            break;
        }
    }
    let digits: String = text[start..i].chars().filter(|c| *c != '_').collect();
    let mut end = i;
    let suffix = bytes.get(i).copied();
    if matches!(suffix, Some(b'd' | b'D' | b'f' | b'F')) && !hex {
        is_float = true;
        end += 1;
    } else if matches!(suffix, Some(b'l' | b'L')) {
        end += 1;
    }
    let bad = || syntax(start, &["numeric literal"], &format!("`{}`", &text[start..end]));
    let tok = if is_float {
        Tok::Float(digits.parse::<f64>().map_err(|_| bad())?)
    } else if hex {
        Tok::Int(BigInt::from_str_radix(&digits[2..], 16).map_err(|_| bad())?)
    } else if binary {
        Tok::Int(BigInt::from_str_radix(&digits[2..], 2).map_err(|_| bad())?)
    } else if digits.len() > 1 && digits.starts_with('0') {
        Tok::Int(BigInt::from_str_radix(&digits[1..], 8).map_err(|_| bad())?)
    } else {
        Tok::Int(digits.parse::<BigInt>().map_err(|_| bad())?)
    };
    Ok((tok, end))
}

fn lex_quoted(text: &str, start: usize, quote: u8) -> Result<(Vec<u16>, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut units = Vec::new();
    let mut i = start + 1;
    loop {
        let Some(&b) = bytes.get(i) else {
            return Err(syntax(start, &["closing quote"], "end of input"));
        };
        if b == quote {
            return Ok((units, i + 1));
        }
        if b != b'\\' {
            let ch = text[i..].chars().next().unwrap();
            let mut buf = [0u16; 2];
            units.extend_from_slice(ch.encode_utf16(&mut buf));
            i += ch.len_utf8();
            continue;
        }
        let esc = bytes.get(i + 1).copied().unwrap_or(0);
        i += 2;
        let unit = match esc {
            b'b' => 0x08,
            b't' => 0x09,
            b'n' => 0x0A,
            b'f' => 0x0C,
            b'r' => 0x0D,
            b's' => 0x20,
            b'\'' => 0x27,
            b'"' => 0x22,
            b'\\' => 0x5C,
            b'0'..=b'7' => {
                let max = if esc <= b'3' { 3 } else { 2 };
                let mut v = (esc - b'0') as u16;
                let mut n = 1;
                while n < max && bytes.get(i).is_some_and(|d| (b'0'..=b'7').contains(d)) {
                    v = v * 8 + (bytes[i] - b'0') as u16;
                    i += 1;
                    n += 1;
                }
                v
            }
            b'u' => {
                while bytes.get(i) == Some(&b'u') {
                    i += 1;
                }
                let hex = text.get(i..i + 4).ok_or_else(|| syntax(i, &["four hex digits"], "end of input"))?;
                let v = u16::from_str_radix(hex, 16).map_err(|_| syntax(i, &["four hex digits"], hex))?;
                i += 4;
                v
            }
            _ => return Err(syntax(i - 1, &["escape sequence"], &format!("`\\{}`", esc as char))),
        };
        units.push(unit);
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

/// Parses one JML expression (no trailing `;`).
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(syntax(0, &["expression"], "empty input"));
    }
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Same as [`parse_expression`] but error offsets are reported relative to
/// an enclosing text that starts `offset` bytes earlier.
pub fn parse_expression_at(text: &str, offset: usize) -> Result<Expr, ParseError> {
    parse_expression(text).map_err(|e| e.shifted(offset))
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.unexpected(&[op]))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::Op("=") => Err(self.unsupported("assignment")),
            _ => Err(self.unexpected(&["operator", "end of input"])),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        syntax(self.offset(), expected, &self.peek().describe())
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        ParseError::Unsupported { position: self.offset(), construct: construct.to_string() }
    }

    fn peek_op(&self) -> Option<&'static str> {
        match self.peek() {
            Tok::Op(op) => Some(op),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let cond = self.equivalence()?;
        if self.eat("?") {
            let then = self.expr()?;
            self.expect(":")?;
            let otherwise = self.expr()?;
            return Ok(Expr::Cond { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) });
        }
        Ok(cond)
    }

    fn equivalence(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.implication()?;
        loop {
            let op = match self.peek_op() {
                Some("<==>") => BinaryOp::Equiv,
                Some("<=!=>") => BinaryOp::NotEquiv,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.implication()?);
        }
    }

    // `==>` is right-associative, `<==` left-associative.
    fn implication(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.binary_level(0)?;
        if self.eat("==>") {
            let rhs = self.implication()?;
            return Ok(Expr::binary(BinaryOp::Implies, lhs, rhs));
        }
        let mut lhs = lhs;
        while self.eat("<==") {
            lhs = Expr::binary(BinaryOp::RevImplies, lhs, self.binary_level(0)?);
        }
        Ok(lhs)
    }

    fn binary_level(&mut self, level: usize) -> Result<Expr, ParseError> {
        const LEVELS: &[&[(&str, BinaryOp)]] = &[
            &[("||", BinaryOp::Or)],
            &[("&&", BinaryOp::And)],
            &[("|", BinaryOp::BitOr)],
            &[("^", BinaryOp::BitXor)],
            &[("&", BinaryOp::BitAnd)],
            &[("==", BinaryOp::Eq), ("!=", BinaryOp::Ne)],
            &[("<", BinaryOp::Lt), ("<=", BinaryOp::Le), (">", BinaryOp::Gt), (">=", BinaryOp::Ge)],
            &[("<<", BinaryOp::Shl), (">>", BinaryOp::Shr), (">>>", BinaryOp::UShr)],
            &[("+", BinaryOp::Add), ("-", BinaryOp::Sub)],
            &[("*", BinaryOp::Mul), ("/", BinaryOp::Div), ("%", BinaryOp::Rem)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            if matches!(self.peek(), Tok::Ident(w) if w == "instanceof") {
                return Err(self.unsupported("instanceof"));
            }
            let Some(op) = self.peek_op() else { return Ok(lhs) };
            let Some(&(_, bop)) = LEVELS[level].iter().find(|(sym, _)| *sym == op) else {
                return Ok(lhs);
            };
            self.bump();
            lhs = Expr::binary(bop, lhs, self.binary_level(level + 1)?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some("!") => {
                self.bump();
                Ok(Expr::unary(UnaryOp::Not, self.unary()?))
            }
            Some("-") => {
                self.bump();
                // `-` directly on a numeric literal is a negative literal, as
                // in Java where `-2147483648` is a valid int.
                let postfix_follows = matches!(self.peek_at(1), Tok::Op("[") | Tok::Op("."));
                if !postfix_follows {
                    match self.peek().clone() {
                        Tok::Int(v) => {
                            self.bump();
                            return Ok(Expr::Int(-v));
                        }
                        Tok::Float(v) => {
                            self.bump();
                            return Ok(Expr::Float(-v));
                        }
                        _ => {}
                    }
                }
                Ok(Expr::unary(UnaryOp::Neg, self.unary()?))
            }
            Some("~") => {
                self.bump();
                Ok(Expr::unary(UnaryOp::BitNot, self.unary()?))
            }
            Some("+") => {
                self.bump();
                self.unary()
            }
            Some("(") => {
                if let (Tok::Ident(w), Tok::Op(")")) = (self.peek_at(1), self.peek_at(2)) {
                    if let Some(ty) = PrimType::from_keyword(w) {
                        self.bump();
                        self.bump();
                        self.bump();
                        let expr = self.unary()?;
                        return Ok(Expr::Cast { ty, expr: Box::new(expr) });
                    }
                }
                self.postfix()
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.eat("[") {
                if self.eat("]") {
                    return Err(self.unsupported("array type"));
                }
                let index = self.expr()?;
                self.expect("]")?;
                e = Expr::Index { base: Box::new(e), index: Box::new(index) };
            } else if self.eat(".") {
                match self.bump() {
                    Tok::Ident(name) if name == "length" => {
                        if matches!(self.peek(), Tok::Op("(")) {
                            return Err(self.unsupported("method call `length()`"));
                        }
                        e = Expr::Length(Box::new(e));
                    }
                    Tok::Ident(name) => {
                        self.pos -= 1;
                        if matches!(self.peek_at(1), Tok::Op("(")) {
                            return Err(self.unsupported(&format!("method call `{name}()`")));
                        }
                        return Err(self.unsupported(&format!("field access `.{name}`")));
                    }
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected(&["length"]));
                    }
                }
            } else if matches!(self.peek(), Tok::Op("(")) {
                return Err(self.unsupported("method call"));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Float(v) => Ok(Expr::Float(v)),
            Tok::Char(c) => Ok(Expr::Char(c)),
            Tok::Str(s) => Ok(Expr::Str(s)),
            Tok::Ident(w) => match w.as_str() {
                "true" => Ok(Expr::Bool(true)),
                "false" => Ok(Expr::Bool(false)),
                "null" => Ok(Expr::Null),
                "this" | "super" | "new" | "instanceof" => {
                    Err(ParseError::Unsupported { position: at, construct: w })
                }
                _ if PrimType::from_keyword(&w).is_some() || w == "void" => {
                    Err(syntax(at, &["expression"], &format!("type `{w}`")))
                }
                _ => Ok(Expr::Ident(w)),
            },
            Tok::Backslash(w) => match w.as_str() {
                "result" => Ok(Expr::Result),
                "old" => {
                    self.expect("(")?;
                    let inner = self.expr()?;
                    if self.eat(",") {
                        return Err(self.unsupported("\\old with label"));
                    }
                    self.expect(")")?;
                    Ok(Expr::Old(Box::new(inner)))
                }
                "forall" | "exists" => {
                    Err(ParseError::Unsupported { position: at, construct: format!("\\{w} without parentheses") })
                }
                _ if UNSUPPORTED_BACKSLASH.contains(&w.as_str()) => {
                    Err(ParseError::Unsupported { position: at, construct: format!("\\{w}") })
                }
                _ => Err(ParseError::Unsupported { position: at, construct: format!("\\{w}") }),
            },
            Tok::Op("(") => {
                if let Tok::Backslash(w) = self.peek().clone() {
                    let kind = match w.as_str() {
                        "forall" => Some(Quantifier::Forall),
                        "exists" => Some(Quantifier::Exists),
                        _ => None,
                    };
                    if let Some(kind) = kind {
                        self.bump();
                        return self.quantified(kind);
                    }
                    if UNSUPPORTED_BACKSLASH.contains(&w.as_str()) {
                        return Err(self.unsupported(&format!("\\{w}")));
                    }
                }
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Op("{") => {
                self.pos -= 1;
                Err(self.unsupported("array initializer"))
            }
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other != Tok::Eof));
                Err(syntax(at, &["expression"], &other.describe()))
            }
        }
    }

    // Called after `( \forall` / `( \exists`.
    fn quantified(&mut self, kind: Quantifier) -> Result<Expr, ParseError> {
        let var_type = match self.peek().clone() {
            Tok::Ident(w) => match PrimType::from_keyword(&w) {
                Some(t) if t.is_integral() => {
                    self.bump();
                    t
                }
                Some(_) => return Err(self.unsupported(&format!("quantifier over `{w}`"))),
                None if w.chars().next().is_some_and(char::is_uppercase) => {
                    return Err(self.unsupported(&format!("quantifier over `{w}`")))
                }
                None => return Err(self.unexpected(&["int", "long", "short", "byte"])),
            },
            Tok::Backslash(w) => return Err(self.unsupported(&format!("quantifier over `\\{w}`"))),
            _ => return Err(self.unexpected(&["int", "long", "short", "byte"])),
        };
        if matches!(self.peek(), Tok::Op("[")) {
            return Err(self.unsupported("quantifier over array type"));
        }
        let var = match self.bump() {
            Tok::Ident(v) if !crate::java::is_keyword(&v) => v,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected(&["identifier"]));
            }
        };
        if self.eat(",") {
            return Err(self.unsupported("multiple quantified variables"));
        }
        self.expect(";")?;
        let first = self.expr()?;
        let (range, body) = if self.eat(";") { (Some(Box::new(first)), self.expr()?) } else { (None, first) };
        self.expect(")")?;
        Ok(Expr::Quantified { kind, var, var_type, range, body: Box::new(body) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn literal_true() {
        assert_eq!(p("true"), Expr::Bool(true));
    }

    #[test]
    fn char_range_conjunction() {
        let e = p("c >= 'A' && c <= 'z'");
        let expect = Expr::binary(
            BinaryOp::And,
            Expr::binary(BinaryOp::Ge, Expr::ident("c"), Expr::Char(b'A' as u16)),
            Expr::binary(BinaryOp::Le, Expr::ident("c"), Expr::Char(b'z' as u16)),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn implication_is_right_associative() {
        let e = p("a ==> b ==> c");
        let expect = Expr::binary(
            BinaryOp::Implies,
            Expr::ident("a"),
            Expr::binary(BinaryOp::Implies, Expr::ident("b"), Expr::ident("c")),
        );
        assert_eq!(e, expect);
        let r = p("a <== b <== c");
        assert!(matches!(r, Expr::Binary { op: BinaryOp::RevImplies, ref lhs, .. }
            if matches!(**lhs, Expr::Binary { op: BinaryOp::RevImplies, .. })));
    }

    #[test]
    fn implication_binds_looser_than_or_and_equivalence_loosest() {
        let e = p("a || b ==> c <==> d");
        let Expr::Binary { op: BinaryOp::Equiv, lhs, .. } = e else { panic!() };
        let Expr::Binary { op: BinaryOp::Implies, lhs, .. } = *lhs else { panic!() };
        assert!(matches!(*lhs, Expr::Binary { op: BinaryOp::Or, .. }));
    }

    #[test]
    fn forall_with_range() {
        let e = p("(\\forall int i; 0 <= i && i < a.length; a[i] >= 0)");
        let Expr::Quantified { kind, var, var_type, range, body } = e else { panic!() };
        assert_eq!(kind, Quantifier::Forall);
        assert_eq!(var, "i");
        assert_eq!(var_type, PrimType::Int);
        assert!(matches!(range.as_deref(), Some(Expr::Binary { op: BinaryOp::And, .. })));
        assert!(matches!(*body, Expr::Binary { op: BinaryOp::Ge, .. }));
    }

    #[test]
    fn cast_and_char_arithmetic() {
        let e = p("\\result == (char)(c - 'a' + 'A')");
        let Expr::Binary { rhs, .. } = e else { panic!() };
        assert!(matches!(*rhs, Expr::Cast { ty: PrimType::Char, .. }));
    }

    #[test]
    fn length_after_index_and_numbers() {
        assert_eq!(p("a[1].length"), Expr::Length(Box::new(Expr::Index {
            base: Box::new(Expr::ident("a")),
            index: Box::new(Expr::int(1)),
        })));
        assert_eq!(p("1.5"), Expr::Float(1.5));
        assert_eq!(p("10L"), Expr::int(10));
        assert_eq!(p("0x1F"), Expr::int(31));
        assert_eq!(p("'\\n'"), Expr::Char(10));
        assert_eq!(p("'\\u0041'"), Expr::Char(65));
        assert_eq!(p("'\\101'"), Expr::Char(65));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        for (src, name) in [
            ("(\\sum int i; 0 <= i && i < 3; i) == 3", "\\sum"),
            ("\\fresh(\\result)", "\\fresh"),
            ("\\result.equals(s)", "method call `equals()`"),
            ("this.x > 0", "this"),
            ("o instanceof String", "instanceof"),
            ("(\\forall int i, j; i < j; true)", "multiple quantified variables"),
        ] {
            match parse_expression(src) {
                Err(ParseError::Unsupported { construct, .. }) => assert_eq!(construct, name, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_report_position_and_expectation() {
        let err = parse_expression("(a && b").unwrap_err();
        match err {
            ParseError::Syntax { position, expected, .. } => {
                assert_eq!(position, 7);
                assert_eq!(expected, vec![")".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("").is_err());
        assert!(parse_expression("a +").is_err());
        assert!(parse_expression("a b").is_err());
    }
}
