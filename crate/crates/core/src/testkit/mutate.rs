use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::random::random_value;
use super::suite::TestSuite;
use super::value::Value;

/// Integer output perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntDelta {
    Offset(i64),
    /// `o + (2|o| + 1)`
    DoubleAbsPlusOne,
    /// `-o`
    Negate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharDelta {
    Offset(i32),
    /// Upper/lower case swap of an ASCII letter.
    FlipCase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloatOp {
    Scale(f64),
    Offset(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayOp {
    InsertElement,
    DeleteElement,
    PerturbElement,
    SwapAdjacent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StringOp {
    FlipCase,
    DropChar,
    AppendChar,
}

/// Operators written as short strings in config files: `+1`, `-1`, `2abs+1`,
/// `neg`, `flipcase`, `*2`, `+1.0`.
macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(IntDelta);
string_serde!(CharDelta);
string_serde!(FloatOp);

fn parse_offset<T: FromStr>(text: &str) -> Option<T> {
    let t = text.strip_prefix('+').unwrap_or(text);
    t.parse().ok()
}

impl fmt::Display for IntDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntDelta::Offset(d) => write!(f, "{d:+}"),
            IntDelta::DoubleAbsPlusOne => f.write_str("2abs+1"),
            IntDelta::Negate => f.write_str("neg"),
        }
    }
}

impl FromStr for IntDelta {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "2abs+1" => Ok(IntDelta::DoubleAbsPlusOne),
            "neg" => Ok(IntDelta::Negate),
            _ => parse_offset(s).map(IntDelta::Offset).ok_or_else(|| format!("bad integer delta `{s}`")),
        }
    }
}

impl fmt::Display for CharDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharDelta::Offset(d) => write!(f, "{d:+}"),
            CharDelta::FlipCase => f.write_str("flipcase"),
        }
    }
}

impl FromStr for CharDelta {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flipcase" => Ok(CharDelta::FlipCase),
            _ => parse_offset(s).map(CharDelta::Offset).ok_or_else(|| format!("bad char delta `{s}`")),
        }
    }
}

impl fmt::Display for FloatOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FloatOp::Scale(x) => write!(f, "*{x:?}"),
            FloatOp::Offset(x) => write!(f, "{}{x:?}", if *x >= 0.0 { "+" } else { "" }),
        }
    }
}

impl FromStr for FloatOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad float operator `{s}`");
        if let Some(f) = s.strip_prefix('*') {
            return f.parse().map(FloatOp::Scale).map_err(|_| bad());
        }
        parse_offset(s).map(FloatOp::Offset).ok_or_else(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct MutationConfig {
    /// Upper bound on mutants per output (k).
    pub mutants_per_output: usize,
    pub integer_deltas: Vec<IntDelta>,
    pub char_deltas: Vec<CharDelta>,
    pub float_ops: Vec<FloatOp>,
    pub array_ops: Vec<ArrayOp>,
    pub string_ops: Vec<StringOp>,
    pub seed: u64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            mutants_per_output: 4,
            integer_deltas: vec![IntDelta::Offset(1), IntDelta::Offset(-1), IntDelta::DoubleAbsPlusOne, IntDelta::Negate],
            char_deltas: vec![CharDelta::Offset(1), CharDelta::Offset(-1), CharDelta::FlipCase],
            float_ops: vec![FloatOp::Scale(2.0), FloatOp::Scale(-1.0), FloatOp::Offset(1.0)],
            array_ops: vec![ArrayOp::InsertElement, ArrayOp::DeleteElement, ArrayOp::PerturbElement, ArrayOp::SwapAdjacent],
            string_ops: vec![StringOp::FlipCase, StringOp::DropChar, StringOp::AppendChar],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("mutants_per_output must be at least 1")]
    ZeroMutants,
    #[error("no {0} operators configured")]
    EmptyOperatorSet(&'static str),
    #[error("no operator yields a distinct mutant of {0}")]
    UnmutableValue(String),
}

// Widening offsets tried after the configured operators until k mutants
// exist: +2, -2, +3, -3, ...
const FILL_RADIUS: i64 = 32;
// Attempts per requested mutant for randomized array/string operators.
const RANDOM_ATTEMPTS: usize = 16;

struct Collector<'o> {
    original: &'o Value,
    k: usize,
    out: Vec<Value>,
}

impl Collector<'_> {
    fn offer(&mut self, m: Option<Value>) {
        let Some(m) = m else { return };
        if self.out.len() < self.k && !same_output(&m, self.original) && !self.out.iter().any(|x| same_output(x, &m)) {
            self.out.push(m);
        }
    }

    fn full(&self) -> bool {
        self.out.len() >= self.k
    }
}

// Structural equality, except doubles compare numerically so `-0.0` is not a
// mutant of `0.0`.
fn same_output(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Float64(x), Value::Float64(y)) => x == y || (x.is_nan() && y.is_nan()),
        (Value::Array { elem: ea, items: a }, Value::Array { elem: eb, items: b }) => {
            ea == eb && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same_output(x, y))
        }
        _ => a == b,
    }
}

fn int_candidates(o: i64, deltas: &[IntDelta]) -> Vec<Option<i64>> {
    let mut out: Vec<Option<i64>> = deltas
        .iter()
        .map(|d| match d {
            IntDelta::Offset(x) => o.checked_add(*x),
            IntDelta::DoubleAbsPlusOne => o.checked_abs().and_then(|a| a.checked_mul(2)).and_then(|a| a.checked_add(1)).and_then(|a| o.checked_add(a)),
            IntDelta::Negate => o.checked_neg(),
        })
        .collect();
    for r in 2..=FILL_RADIUS {
        out.push(o.checked_add(r));
        out.push(o.checked_sub(r));
    }
    out
}

fn flip_ascii_case(c: u16) -> Option<u16> {
    match c {
        0x41..=0x5A => Some(c + 0x20),
        0x61..=0x7A => Some(c - 0x20),
        _ => None,
    }
}

/// Up to `k` distinct, type-preserving mutants of `o`, none equal to
/// `o`. Deterministic for fixed `(o, cfg)`.
pub fn mutate_output(o: &Value, cfg: &MutationConfig) -> Result<Vec<Value>, MutationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    mutate_with(o, cfg, &mut rng)
}

fn mutate_with(o: &Value, cfg: &MutationConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Value>, MutationError> {
    if cfg.mutants_per_output == 0 {
        return Err(MutationError::ZeroMutants);
    }
    let mut c = Collector { original: o, k: cfg.mutants_per_output, out: Vec::new() };
    match o {
        Value::Null => return Err(MutationError::UnmutableValue("null".into())),
        Value::Bool(b) => c.offer(Some(Value::Bool(!b))),
        Value::Int32(v) => {
            if cfg.integer_deltas.is_empty() {
                return Err(MutationError::EmptyOperatorSet("integer"));
            }
            for m in int_candidates(*v as i64, &cfg.integer_deltas) {
                c.offer(m.and_then(|m| i32::try_from(m).ok()).map(Value::Int32));
            }
        }
        Value::Int64(v) => {
            if cfg.integer_deltas.is_empty() {
                return Err(MutationError::EmptyOperatorSet("integer"));
            }
            for m in int_candidates(*v, &cfg.integer_deltas) {
                c.offer(m.map(Value::Int64));
            }
        }
        Value::Char(v) => {
            if cfg.char_deltas.is_empty() {
                return Err(MutationError::EmptyOperatorSet("char"));
            }
            let shift = |d: i64| u16::try_from(*v as i64 + d).ok().map(Value::Char);
            for d in &cfg.char_deltas {
                c.offer(match d {
                    CharDelta::Offset(x) => shift(*x as i64),
                    CharDelta::FlipCase => flip_ascii_case(*v).map(Value::Char),
                });
            }
            for r in 2..=FILL_RADIUS {
                c.offer(shift(r));
                c.offer(shift(-r));
            }
        }
        Value::Float64(x) => {
            if cfg.float_ops.is_empty() {
                return Err(MutationError::EmptyOperatorSet("float"));
            }
            for op in &cfg.float_ops {
                c.offer(Some(Value::Float64(match op {
                    FloatOp::Scale(f) => x * f,
                    FloatOp::Offset(d) => x + d,
                })));
            }
            for r in 2..=FILL_RADIUS {
                c.offer(Some(Value::Float64(x + r as f64)));
                c.offer(Some(Value::Float64(x - r as f64)));
            }
        }
        Value::Str(s) => {
            if cfg.string_ops.is_empty() {
                return Err(MutationError::EmptyOperatorSet("string"));
            }
            randomized(&mut c, &cfg.string_ops, rng, |op, rng| string_op(s, *op, rng));
        }
        Value::Array { elem, items } => {
            if cfg.array_ops.is_empty() {
                return Err(MutationError::EmptyOperatorSet("array"));
            }
            randomized(&mut c, &cfg.array_ops, rng, |op, rng| {
                array_op(elem, items, *op, cfg, rng).map(|items| Value::array(elem.clone(), items))
            });
        }
    }
    if c.out.is_empty() {
        return Err(MutationError::UnmutableValue(o.to_string()));
    }
    Ok(c.out)
}

// Round-robin over the operators first so each one gets a chance, then
// random picks until k mutants or the attempt budget is spent.
fn randomized<Op>(
    c: &mut Collector<'_>,
    ops: &[Op],
    rng: &mut ChaCha8Rng,
    mut apply: impl FnMut(&Op, &mut ChaCha8Rng) -> Option<Value>,
) {
    for op in ops {
        if c.full() {
            return;
        }
        let m = apply(op, rng);
        c.offer(m);
    }
    for _ in 0..RANDOM_ATTEMPTS * c.k {
        if c.full() {
            return;
        }
        let op = ops.choose(rng).expect("non-empty operator set");
        let m = apply(op, rng);
        c.offer(m);
    }
}

fn string_op(s: &str, op: StringOp, rng: &mut ChaCha8Rng) -> Option<Value> {
    let chars: Vec<char> = s.chars().collect();
    match op {
        StringOp::FlipCase => {
            let cased: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_ascii_alphabetic()).collect();
            let &i = cased.choose(rng)?;
            let mut out = chars.clone();
            out[i] = if out[i].is_ascii_uppercase() { out[i].to_ascii_lowercase() } else { out[i].to_ascii_uppercase() };
            Some(Value::Str(out.into_iter().collect()))
        }
        StringOp::DropChar => {
            if chars.is_empty() {
                return None;
            }
            let i = rng.gen_range(0..chars.len());
            let mut out = chars;
            out.remove(i);
            Some(Value::Str(out.into_iter().collect()))
        }
        StringOp::AppendChar => {
            let c = rng.gen_range(0x20u8..0x7F) as char;
            Some(Value::Str(format!("{s}{c}")))
        }
    }
}

fn array_op(
    elem: &super::value::TypeTag,
    items: &[Value],
    op: ArrayOp,
    cfg: &MutationConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Value>> {
    let mut out = items.to_vec();
    match op {
        ArrayOp::InsertElement => {
            let at = rng.gen_range(0..=out.len());
            out.insert(at, random_value(elem, rng));
        }
        ArrayOp::DeleteElement => {
            if out.is_empty() {
                return None;
            }
            out.remove(rng.gen_range(0..out.len()));
        }
        ArrayOp::PerturbElement => {
            let perturbable: Vec<usize> = (0..out.len()).filter(|&i| out[i] != Value::Null).collect();
            let &i = perturbable.choose(rng)?;
            let element_cfg = MutationConfig { mutants_per_output: 1, seed: rng.gen(), ..cfg.clone() };
            let mut inner = ChaCha8Rng::seed_from_u64(element_cfg.seed);
            out[i] = mutate_with(&out[i], &element_cfg, &mut inner).ok()?.remove(0);
        }
        ArrayOp::SwapAdjacent => {
            let swappable: Vec<usize> = (0..out.len().saturating_sub(1)).filter(|&i| out[i] != out[i + 1]).collect();
            let &i = swappable.choose(rng)?;
            out.swap(i, i + 1);
        }
    }
    Some(out)
}

/// One entry of the mutant pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MutantPair {
    pub pair_index: usize,
    pub inputs: Vec<Value>,
    pub original: Value,
    pub mutant: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PoolWarning {
    pub pair_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantPool {
    pub mutants: Vec<MutantPair>,
    pub warnings: Vec<PoolWarning>,
}

/// The mutant pool in suite order, then mutant order. Outputs that cannot be mutated are
/// skipped with a warning. Each pair draws from its own stream derived from
/// the seed and the pair index.
pub fn build_mutant_pool(suite: &TestSuite, cfg: &MutationConfig) -> Result<MutantPool, MutationError> {
    let mut pool = MutantPool { mutants: Vec::new(), warnings: Vec::new() };
    for (idx, pair) in suite.valid_pairs.iter().enumerate() {
        let pair_cfg = MutationConfig { seed: cfg.seed.wrapping_add(idx as u64), ..cfg.clone() };
        match mutate_output(&pair.output, &pair_cfg) {
            Ok(ms) => pool.mutants.extend(ms.into_iter().map(|m| MutantPair {
                pair_index: idx,
                inputs: pair.inputs.clone(),
                original: pair.output.clone(),
                mutant: m,
            })),
            Err(e @ MutationError::UnmutableValue(_)) => {
                pool.warnings.push(PoolWarning { pair_index: idx, message: e.to_string() })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(pool)
}
