use std::fmt::{self, Display, Write};

use super::ast::{Expr, UnaryOp};

/// Fully parenthesized rendering that reparses to the same tree. The output
/// is also valid Java expression syntax (plus JML operators), so it can be
/// dropped into a `//@ assert` line.
impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Char(c) => write_char_literal(f, *c),
            Expr::Int(v) if v.sign() == num_bigint::Sign::Minus => write!(f, "(-{})", v.magnitude()),
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Float(x) => write_float(f, *x),
            Expr::Str(s) => write_string_literal(f, s),
            Expr::Null => f.write_str("null"),
            Expr::Ident(name) => f.write_str(name),
            Expr::Result => f.write_str("\\result"),
            Expr::Old(e) => write!(f, "\\old({e})"),
            Expr::Index { base, index } => {
                write_postfix_base(f, base)?;
                write!(f, "[{index}]")
            }
            Expr::Length(base) => {
                write_postfix_base(f, base)?;
                f.write_str(".length")
            }
            Expr::Cast { ty, expr } => write!(f, "(({}) {expr})", ty.keyword()),
            Expr::Unary { op: UnaryOp::Neg, operand } if matches!(**operand, Expr::Int(_) | Expr::Float(_)) => {
                write!(f, "(-({operand}))")
            }
            Expr::Unary { op, operand } => write!(f, "({}{operand})", op.symbol()),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Cond { cond, then, otherwise } => write!(f, "({cond} ? {then} : {otherwise})"),
            Expr::Quantified { kind, var, var_type, range, body } => {
                write!(f, "({} {} {var}; ", kind.keyword(), var_type.keyword())?;
                if let Some(r) = range {
                    write!(f, "{r}; ")?;
                }
                write!(f, "{body})")
            }
        }
    }
}

fn write_postfix_base(f: &mut fmt::Formatter<'_>, base: &Expr) -> fmt::Result {
    match base {
        Expr::Ident(_) | Expr::Result | Expr::Old(_) | Expr::Index { .. } | Expr::Length(_) => {
            write!(f, "{base}")
        }
        _ => write!(f, "({base})"),
    }
}

fn write_float(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.is_nan() {
        return f.write_str("(0.0 / 0.0)");
    }
    if x.is_infinite() {
        return f.write_str(if x > 0.0 { "(1.0 / 0.0)" } else { "(-1.0 / 0.0)" });
    }
    let body = format!("{:?}", x.abs());
    let body = if body.contains(['.', 'e', 'E']) { body } else { format!("{body}.0") };
    if x.is_sign_negative() {
        write!(f, "(-{body})")
    } else {
        f.write_str(&body)
    }
}

// Unicode escapes are avoided for quote, backslash and line terminators
// because Java translates `\uXXXX` before lexing.
fn escape_unit(out: &mut impl Write, unit: u16, quote: char) -> fmt::Result {
    match unit {
        0x08 => out.write_str("\\b"),
        0x09 => out.write_str("\\t"),
        0x0A => out.write_str("\\n"),
        0x0C => out.write_str("\\f"),
        0x0D => out.write_str("\\r"),
        0x5C => out.write_str("\\\\"),
        u if u == quote as u16 => write!(out, "\\{quote}"),
        0x20..=0x7E => out.write_char(unit as u8 as char),
        0..=0xFF => write!(out, "\\{unit:03o}"),
        _ => write!(out, "\\u{unit:04x}"),
    }
}

fn write_char_literal(f: &mut fmt::Formatter<'_>, c: u16) -> fmt::Result {
    f.write_char('\'')?;
    escape_unit(f, c, '\'')?;
    f.write_char('\'')
}

fn write_string_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for unit in s.encode_utf16() {
        escape_unit(f, unit, '"')?;
    }
    f.write_char('"')
}

/// Java source form of a string literal.
pub fn java_string_literal(s: &str) -> String {
    Expr::Str(s.to_string()).to_string()
}

/// Java source form of a char literal.
pub fn java_char_literal(c: u16) -> String {
    Expr::Char(c).to_string()
}
