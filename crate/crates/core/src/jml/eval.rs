//! Concrete evaluation of JML predicates.
//!
//! With every parameter and the result bound to a literal, the Hoare triple
//! `{true} params := inputs; result := output {post}` is valid exactly when
//! `post` evaluates to true, so the builtin backend reduces each check to one
//! call of [`evaluate`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ast::{BinaryOp, Expr, PrimType, Quantifier, UnaryOp};
use crate::testkit::Value;

pub const DEFAULT_QUANTIFIER_BUDGET: u64 = 100_000;

// Shift counts beyond this are rejected in unbounded mode.
const MAX_UNBOUNDED_SHIFT: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    /// Mathematical integers.
    #[default]
    Unbounded,
    /// Two's-complement wraparound at 32 bits.
    Wrap32,
    /// Two's-complement wraparound at 64 bits.
    Wrap64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub arithmetic: ArithmeticMode,
    pub quantifier_budget: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { arithmetic: ArithmeticMode::Unbounded, quantifier_budget: DEFAULT_QUANTIFIER_BUDGET }
    }
}

/// Variable state a predicate is evaluated in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    pub bindings: BTreeMap<String, Value>,
    pub result: Option<Value>,
    /// Pre-state used by `\old(..)`.
    pub old_bindings: BTreeMap<String, Value>,
}

impl Env {
    /// Stub state `x := i; y := o`: parameters are never reassigned, so the
    /// pre-state equals the post-state.
    pub fn harness(params: impl IntoIterator<Item = (String, Value)>, result: Option<Value>) -> Env {
        let bindings: BTreeMap<String, Value> = params.into_iter().collect();
        Env { old_bindings: bindings.clone(), bindings, result }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalErrorReason {
    UnsupportedConstruct,
    UnboundedQuantifier,
    DivisionByZero,
    IndexOutOfBounds,
    TypeMismatch,
    QuantifierBudgetExceeded,
    NullDereference,
    UnboundIdentifier,
    /// External verifier crashed or produced no usable verdict.
    BackendFailure,
    BackendTimeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    EvalError {
        reason: EvalErrorReason,
        /// Printed form of the offending subexpression.
        at: String,
    },
}

impl Verdict {
    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated)
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Verdict::EvalError { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::EvalError { .. } => "eval_error",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("Holds"),
            Verdict::Violated => f.write_str("Violated"),
            Verdict::EvalError { reason, at } => write!(f, "EvalError({reason:?}) at {at}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct VerdictRepr {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    reason: Option<EvalErrorReason>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    at: Option<String>,
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (reason, at) = match self {
            Verdict::EvalError { reason, at } => (Some(*reason), Some(at.clone())),
            _ => (None, None),
        };
        VerdictRepr { verdict: self.label().to_string(), reason, at }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = VerdictRepr::deserialize(d)?;
        match (r.verdict.as_str(), r.reason) {
            ("holds", _) => Ok(Verdict::Holds),
            ("violated", _) => Ok(Verdict::Violated),
            ("eval_error", Some(reason)) => Ok(Verdict::EvalError { reason, at: r.at.unwrap_or_default() }),
            (other, _) => Err(serde::de::Error::custom(format!("bad verdict {other:?}"))),
        }
    }
}

/// Evaluates a boolean predicate. Never panics; anything that is not a
/// definite true/false comes back as [`Verdict::EvalError`].
pub fn evaluate(e: &Expr, env: &Env, opts: &EvalOptions) -> Verdict {
    let mut ev = Evaluator { env, opts, locals: Vec::new(), in_old: false, spent: 0 };
    match ev.eval(e) {
        Ok(Rv::Bool(true)) => Verdict::Holds,
        Ok(Rv::Bool(false)) => Verdict::Violated,
        Ok(_) => Verdict::EvalError { reason: EvalErrorReason::TypeMismatch, at: e.to_string() },
        Err(Fault { reason, at }) => Verdict::EvalError { reason, at: at.to_string() },
    }
}

#[derive(Debug, Clone)]
enum Rv<'a> {
    Bool(bool),
    Char(u16),
    Int(BigInt),
    Float(f64),
    Str(&'a str),
    Null,
    Array(&'a [Value]),
}

impl<'a> Rv<'a> {
    fn from_value(v: &'a Value) -> Rv<'a> {
        match v {
            Value::Bool(b) => Rv::Bool(*b),
            Value::Char(c) => Rv::Char(*c),
            Value::Int32(n) => Rv::Int(BigInt::from(*n)),
            Value::Int64(n) => Rv::Int(BigInt::from(*n)),
            Value::Float64(x) => Rv::Float(*x),
            Value::Str(s) => Rv::Str(s),
            Value::Null => Rv::Null,
            Value::Array { items, .. } => Rv::Array(items),
        }
    }

    fn integral(&self) -> Option<BigInt> {
        match self {
            Rv::Char(c) => Some(BigInt::from(*c)),
            Rv::Int(v) => Some(v.clone()),
            _ => None,
        }
    }

    fn numeric_f64(&self) -> Option<f64> {
        match self {
            Rv::Char(c) => Some(*c as f64),
            Rv::Int(v) => v.to_f64(),
            Rv::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, Rv::Char(_) | Rv::Int(_) | Rv::Float(_))
    }
}

struct Fault<'a> {
    reason: EvalErrorReason,
    at: &'a Expr,
}

type R<'a, T> = Result<T, Fault<'a>>;

fn fault<T>(reason: EvalErrorReason, at: &Expr) -> R<'_, T> {
    Err(Fault { reason, at })
}

struct Evaluator<'a> {
    env: &'a Env,
    opts: &'a EvalOptions,
    locals: Vec<(&'a str, BigInt)>,
    in_old: bool,
    spent: u64,
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, e: &'a Expr) -> R<'a, Rv<'a>> {
        use EvalErrorReason::*;
        match e {
            Expr::Bool(b) => Ok(Rv::Bool(*b)),
            Expr::Char(c) => Ok(Rv::Char(*c)),
            Expr::Int(v) => Ok(Rv::Int(v.clone())),
            Expr::Float(x) => Ok(Rv::Float(*x)),
            Expr::Str(s) => Ok(Rv::Str(s)),
            Expr::Null => Ok(Rv::Null),
            Expr::Ident(name) => {
                if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
                    return Ok(Rv::Int(v.clone()));
                }
                let scope = if self.in_old { &self.env.old_bindings } else { &self.env.bindings };
                scope.get(name).map(Rv::from_value).ok_or(Fault { reason: UnboundIdentifier, at: e })
            }
            Expr::Result => self.env.result.as_ref().map(Rv::from_value).ok_or(Fault { reason: UnboundIdentifier, at: e }),
            Expr::Old(inner) => {
                let saved = std::mem::replace(&mut self.in_old, true);
                let r = self.eval(inner);
                self.in_old = saved;
                r
            }
            Expr::Index { base, index } => {
                let b = self.eval(base)?;
                let i = self.eval(index)?;
                let items = match b {
                    Rv::Array(items) => items,
                    Rv::Null => return fault(NullDereference, e),
                    _ => return fault(TypeMismatch, e),
                };
                let Some(i) = i.integral() else { return fault(TypeMismatch, index) };
                match i.to_usize().and_then(|i| items.get(i)) {
                    Some(v) => Ok(Rv::from_value(v)),
                    None => fault(IndexOutOfBounds, e),
                }
            }
            Expr::Length(base) => match self.eval(base)? {
                Rv::Array(items) => Ok(Rv::Int(BigInt::from(items.len()))),
                Rv::Null => fault(NullDereference, e),
                _ => fault(TypeMismatch, e),
            },
            Expr::Cast { ty, expr } => {
                let v = self.eval(expr)?;
                cast(*ty, v).ok_or(Fault { reason: TypeMismatch, at: e })
            }
            Expr::Unary { op, operand } => {
                let v = self.eval(operand)?;
                match (op, v) {
                    (UnaryOp::Not, Rv::Bool(b)) => Ok(Rv::Bool(!b)),
                    (UnaryOp::Neg, Rv::Float(x)) => Ok(Rv::Float(-x)),
                    (UnaryOp::Neg, v) => match v.integral() {
                        Some(n) => Ok(Rv::Int(self.wrap(-n))),
                        None => fault(TypeMismatch, e),
                    },
                    (UnaryOp::BitNot, v) => match v.integral() {
                        Some(n) => Ok(Rv::Int(self.wrap(-n - 1))),
                        None => fault(TypeMismatch, e),
                    },
                    _ => fault(TypeMismatch, e),
                }
            }
            Expr::Binary { op, lhs, rhs } => self.binary(e, *op, lhs, rhs),
            Expr::Cond { cond, then, otherwise } => match self.eval(cond)? {
                Rv::Bool(true) => self.eval(then),
                Rv::Bool(false) => self.eval(otherwise),
                _ => fault(TypeMismatch, cond),
            },
            Expr::Quantified { kind, var, range, body, .. } => self.quantified(e, *kind, var, range.as_deref(), body),
        }
    }

    fn wrap(&self, n: BigInt) -> BigInt {
        match self.opts.arithmetic {
            ArithmeticMode::Unbounded => n,
            ArithmeticMode::Wrap32 => BigInt::from(wrap_to_u64(&n) as u32 as i32),
            ArithmeticMode::Wrap64 => BigInt::from(wrap_to_u64(&n) as i64),
        }
    }

    fn boolean(&mut self, e: &'a Expr) -> R<'a, bool> {
        match self.eval(e)? {
            Rv::Bool(b) => Ok(b),
            _ => fault(EvalErrorReason::TypeMismatch, e),
        }
    }

    fn binary(&mut self, e: &'a Expr, op: BinaryOp, lhs: &'a Expr, rhs: &'a Expr) -> R<'a, Rv<'a>> {
        use EvalErrorReason::*;
        match op {
            BinaryOp::And => return Ok(Rv::Bool(self.boolean(lhs)? && self.boolean(rhs)?)),
            BinaryOp::Or => return Ok(Rv::Bool(self.boolean(lhs)? || self.boolean(rhs)?)),
            BinaryOp::Implies => return Ok(Rv::Bool(!self.boolean(lhs)? || self.boolean(rhs)?)),
            BinaryOp::RevImplies => return Ok(Rv::Bool(self.boolean(lhs)? || !self.boolean(rhs)?)),
            BinaryOp::Equiv => {
                let a = self.boolean(lhs)?;
                return Ok(Rv::Bool(a == self.boolean(rhs)?));
            }
            BinaryOp::NotEquiv => {
                let a = self.boolean(lhs)?;
                return Ok(Rv::Bool(a != self.boolean(rhs)?));
            }
            _ => {}
        }
        let a = self.eval(lhs)?;
        let b = self.eval(rhs)?;
        match op {
            BinaryOp::Eq | BinaryOp::Ne => {
                let eq = values_equal(&a, &b).ok_or(Fault { reason: TypeMismatch, at: e })?;
                Ok(Rv::Bool(eq == (op == BinaryOp::Eq)))
            }
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                let ord = match (a.integral(), b.integral()) {
                    (Some(x), Some(y)) => Some(x.cmp(&y)),
                    _ if a.is_numeric() && b.is_numeric() => {
                        a.numeric_f64().unwrap().partial_cmp(&b.numeric_f64().unwrap())
                    }
                    _ => return fault(TypeMismatch, e),
                };
                // NaN compares false under every relational operator.
                let Some(ord) = ord else { return Ok(Rv::Bool(false)) };
                Ok(Rv::Bool(match op {
                    BinaryOp::Lt => ord.is_lt(),
                    BinaryOp::Le => ord.is_le(),
                    BinaryOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                }))
            }
            BinaryOp::BitAnd | BinaryOp::BitOr | BinaryOp::BitXor => {
                if let (Rv::Bool(x), Rv::Bool(y)) = (&a, &b) {
                    return Ok(Rv::Bool(match op {
                        BinaryOp::BitAnd => x & y,
                        BinaryOp::BitOr => x | y,
                        _ => x ^ y,
                    }));
                }
                let (Some(x), Some(y)) = (a.integral(), b.integral()) else { return fault(TypeMismatch, e) };
                Ok(Rv::Int(self.wrap(match op {
                    BinaryOp::BitAnd => x & y,
                    BinaryOp::BitOr => x | y,
                    _ => x ^ y,
                })))
            }
            BinaryOp::Shl | BinaryOp::Shr | BinaryOp::UShr => {
                let (Some(x), Some(n)) = (a.integral(), b.integral()) else { return fault(TypeMismatch, e) };
                self.shift(e, op, x, n)
            }
            BinaryOp::Add if matches!(a, Rv::Str(_)) || matches!(b, Rv::Str(_)) => {
                fault(UnsupportedConstruct, e)
            }
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
                if let (Some(x), Some(y)) = (a.integral(), b.integral()) {
                    let r = match op {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        BinaryOp::Mul => x * y,
                        _ if y.is_zero() => return fault(DivisionByZero, e),
                        // Truncating division and remainder, as in Java.
                        BinaryOp::Div => x / y,
                        _ => x % y,
                    };
                    return Ok(Rv::Int(self.wrap(r)));
                }
                let (Some(x), Some(y)) = (a.numeric_f64(), b.numeric_f64()) else { return fault(TypeMismatch, e) };
                Ok(Rv::Float(match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => x / y,
                    _ => x % y,
                }))
            }
            _ => unreachable!("logical operators handled above"),
        }
    }

    fn shift(&self, e: &'a Expr, op: BinaryOp, x: BigInt, n: BigInt) -> R<'a, Rv<'a>> {
        use EvalErrorReason::*;
        let v = match self.opts.arithmetic {
            ArithmeticMode::Wrap32 => {
                let x = wrap_to_u64(&x) as u32 as i32;
                let n = (wrap_to_u64(&n) & 31) as u32;
                BigInt::from(match op {
                    BinaryOp::Shl => x.wrapping_shl(n),
                    BinaryOp::Shr => x >> n,
                    _ => ((x as u32) >> n) as i32,
                })
            }
            ArithmeticMode::Wrap64 => {
                let x = wrap_to_u64(&x) as i64;
                let n = (wrap_to_u64(&n) & 63) as u32;
                BigInt::from(match op {
                    BinaryOp::Shl => x.wrapping_shl(n),
                    BinaryOp::Shr => x >> n,
                    _ => ((x as u64) >> n) as i64,
                })
            }
            ArithmeticMode::Unbounded => {
                let Some(n) = n.to_u32().filter(|n| *n <= MAX_UNBOUNDED_SHIFT) else {
                    return fault(UnsupportedConstruct, e);
                };
                match op {
                    BinaryOp::Shl => x << n,
                    BinaryOp::Shr => floor_shr(&x, n),
                    // Logical shift has no meaning without a width.
                    _ if x.is_negative() => return fault(UnsupportedConstruct, e),
                    _ => x >> n,
                }
            }
        };
        Ok(Rv::Int(v))
    }

    fn quantified(
        &mut self,
        e: &'a Expr,
        kind: Quantifier,
        var: &'a str,
        range: Option<&'a Expr>,
        body: &'a Expr,
    ) -> R<'a, Rv<'a>> {
        use EvalErrorReason::*;
        // Without a range, the guard is the antecedent of a universal
        // implication or the first conjunct of an existential body.
        let guard = match (range, kind, body) {
            (Some(r), _, _) => Some(r),
            (None, Quantifier::Forall, Expr::Binary { op: BinaryOp::Implies, lhs, .. }) => Some(lhs.as_ref()),
            (None, Quantifier::Exists, Expr::Binary { op: BinaryOp::And, lhs, .. }) => Some(lhs.as_ref()),
            _ => None,
        };
        let Some(guard) = guard else { return fault(UnboundedQuantifier, e) };
        let (mut lower, mut upper): (Option<BigInt>, Option<BigInt>) = (None, None);
        for (side, bound_expr, adjust) in bound_candidates(guard, var) {
            let v = self.eval(bound_expr)?;
            let Some(v) = v.integral() else { return fault(TypeMismatch, bound_expr) };
            let v = v + adjust;
            match side {
                Side::Lower => lower = Some(lower.map_or(v.clone(), |l| l.max(v))),
                Side::Upper => upper = Some(upper.map_or(v.clone(), |u| u.min(v))),
            }
        }
        let (Some(lo), Some(hi)) = (lower, upper) else { return fault(UnboundedQuantifier, e) };
        if hi < lo {
            return Ok(Rv::Bool(kind == Quantifier::Forall));
        }
        let count = (&hi - &lo) + BigInt::one();
        let remaining = self.opts.quantifier_budget.saturating_sub(self.spent);
        if count > BigInt::from(remaining) {
            return fault(QuantifierBudgetExceeded, e);
        }
        let mut i = lo;
        while i <= hi {
            self.spent += 1;
            if self.spent > self.opts.quantifier_budget {
                return fault(QuantifierBudgetExceeded, e);
            }
            self.locals.push((var, i.clone()));
            let outcome = self.instance(range, body);
            self.locals.pop();
            match (kind, outcome?) {
                (Quantifier::Forall, Some(false)) => return Ok(Rv::Bool(false)),
                (Quantifier::Exists, Some(true)) => return Ok(Rv::Bool(true)),
                _ => {}
            }
            i += 1;
        }
        Ok(Rv::Bool(kind == Quantifier::Forall))
    }

    /// `None` when the range excludes the current instance.
    fn instance(&mut self, range: Option<&'a Expr>, body: &'a Expr) -> R<'a, Option<bool>> {
        if let Some(r) = range {
            if !self.boolean(r)? {
                return Ok(None);
            }
        }
        self.boolean(body).map(Some)
    }
}

#[derive(Clone, Copy)]
enum Side {
    Lower,
    Upper,
}

/// Syntactic bounds on `var` found among the top-level conjuncts of
/// `guard`, as (side, bound expression, inclusive adjustment).
fn bound_candidates<'a>(guard: &'a Expr, var: &str) -> Vec<(Side, &'a Expr, i64)> {
    let mut conjuncts = Vec::new();
    flatten_and(guard, &mut conjuncts);
    let is_var = |e: &Expr| matches!(e, Expr::Ident(n) if n == var);
    let independent = |e: &Expr| !e.free_identifiers().iter().any(|n| n == var);
    let mut out = Vec::new();
    for c in conjuncts {
        let Expr::Binary { op, lhs, rhs } = c else { continue };
        let (op, bound) = if is_var(lhs) && independent(rhs) {
            (*op, rhs.as_ref())
        } else if is_var(rhs) && independent(lhs) {
            // Mirror `b op i` into `i op' b`.
            let mirrored = match op {
                BinaryOp::Lt => BinaryOp::Gt,
                BinaryOp::Le => BinaryOp::Ge,
                BinaryOp::Gt => BinaryOp::Lt,
                BinaryOp::Ge => BinaryOp::Le,
                other => *other,
            };
            (mirrored, lhs.as_ref())
        } else {
            continue;
        };
        match op {
            BinaryOp::Gt => out.push((Side::Lower, bound, 1)),
            BinaryOp::Ge => out.push((Side::Lower, bound, 0)),
            BinaryOp::Lt => out.push((Side::Upper, bound, -1)),
            BinaryOp::Le => out.push((Side::Upper, bound, 0)),
            BinaryOp::Eq => {
                out.push((Side::Lower, bound, 0));
                out.push((Side::Upper, bound, 0));
            }
            _ => {}
        }
    }
    out
}

fn flatten_and<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary { op: BinaryOp::And, lhs, rhs } => {
            flatten_and(lhs, out);
            flatten_and(rhs, out);
        }
        other => out.push(other),
    }
}

fn values_equal(a: &Rv<'_>, b: &Rv<'_>) -> Option<bool> {
    Some(match (a, b) {
        (Rv::Bool(x), Rv::Bool(y)) => x == y,
        (Rv::Null, Rv::Null) => true,
        (Rv::Null, Rv::Str(_) | Rv::Array(_)) | (Rv::Str(_) | Rv::Array(_), Rv::Null) => false,
        (Rv::Str(x), Rv::Str(y)) => x == y,
        (Rv::Array(x), Rv::Array(y)) => x == y,
        _ => match (a.integral(), b.integral()) {
            (Some(x), Some(y)) => x == y,
            _ if a.is_numeric() && b.is_numeric() => a.numeric_f64()?.to_bits() == b.numeric_f64()?.to_bits(),
            _ => return None,
        },
    })
}

/// Low 64 bits of the two's-complement representation.
fn wrap_to_u64(n: &BigInt) -> u64 {
    let modulus = BigInt::one() << 64;
    let r: BigInt = ((n % &modulus) + &modulus) % &modulus;
    r.to_u64().unwrap()
}

fn floor_shr(x: &BigInt, n: u32) -> BigInt {
    let d = BigInt::one() << n;
    let q = x / &d;
    if x.is_negative() && !(x % &d).is_zero() {
        q - 1
    } else {
        q
    }
}

fn cast<'a>(ty: PrimType, v: Rv<'a>) -> Option<Rv<'a>> {
    let narrow = |n: BigInt| -> Option<Rv<'a>> {
        let bits = wrap_to_u64(&n);
        Some(match ty {
            PrimType::Char => Rv::Char(bits as u16),
            PrimType::Byte => Rv::Int(BigInt::from(bits as u8 as i8)),
            PrimType::Short => Rv::Int(BigInt::from(bits as u16 as i16)),
            PrimType::Int => Rv::Int(BigInt::from(bits as u32 as i32)),
            PrimType::Long => Rv::Int(BigInt::from(bits as i64)),
            PrimType::Float => Rv::Float(n.to_f64()? as f32 as f64),
            PrimType::Double => Rv::Float(n.to_f64()?),
            PrimType::Boolean => return None,
        })
    };
    match v {
        Rv::Bool(b) => (ty == PrimType::Boolean).then_some(Rv::Bool(b)),
        Rv::Char(c) => narrow(BigInt::from(c)),
        Rv::Int(n) => narrow(n),
        Rv::Float(x) => match ty {
            PrimType::Double => Some(Rv::Float(x)),
            PrimType::Float => Some(Rv::Float(x as f32 as f64)),
            PrimType::Boolean => None,
            // Java narrows through int (or long) with saturation; NaN -> 0.
            PrimType::Long => Some(Rv::Int(BigInt::from(x as i64))),
            _ => narrow(BigInt::from(x as i32)),
        },
        _ => None,
    }
}
