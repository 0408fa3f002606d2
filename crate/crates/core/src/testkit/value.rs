use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value as Json};

use crate::jml::printer::{java_char_literal, java_string_literal};

/// Java type of a parameter, return value or array element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeTag {
    Boolean,
    Char,
    Int,
    Long,
    Double,
    String,
    Array(Box<TypeTag>),
    Void,
    /// Any class type other than `String`.
    Object(String),
}

impl TypeTag {
    pub fn parse(text: &str) -> TypeTag {
        let text = text.trim();
        if let Some(inner) = text.strip_suffix("[]") {
            return TypeTag::Array(Box::new(TypeTag::parse(inner)));
        }
        match text {
            "boolean" => TypeTag::Boolean,
            "char" => TypeTag::Char,
            "int" => TypeTag::Int,
            "long" => TypeTag::Long,
            "double" => TypeTag::Double,
            "String" | "java.lang.String" => TypeTag::String,
            "void" => TypeTag::Void,
            other => TypeTag::Object(other.to_string()),
        }
    }

    pub fn java_name(&self) -> String {
        match self {
            TypeTag::Boolean => "boolean".into(),
            TypeTag::Char => "char".into(),
            TypeTag::Int => "int".into(),
            TypeTag::Long => "long".into(),
            TypeTag::Double => "double".into(),
            TypeTag::String => "String".into(),
            TypeTag::Array(inner) => format!("{}[]", inner.java_name()),
            TypeTag::Void => "void".into(),
            TypeTag::Object(name) => name.clone(),
        }
    }

    /// Types the value model, generators and harness can handle.
    pub fn is_supported(&self) -> bool {
        match self {
            TypeTag::Void | TypeTag::Object(_) => false,
            TypeTag::Array(inner) => inner.is_supported(),
            _ => true,
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, TypeTag::String | TypeTag::Array(_) | TypeTag::Object(_))
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.java_name())
    }
}

impl Serialize for TypeTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.java_name())
    }
}

impl<'de> Deserialize<'de> for TypeTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(TypeTag::parse(&String::deserialize(d)?))
    }
}

/// Concrete Java value.
#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    /// UTF-16 code unit, always within `0..=0xFFFF`.
    Char(u16),
    Int32(i32),
    Int64(i64),
    Float64(f64),
    Str(String),
    Null,
    /// Homogeneous array; `elem` is recorded even when `items` is empty.
    Array { elem: TypeTag, items: Vec<Value> },
}

/// Structural equality; doubles compare by bit pattern.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Char(a), Value::Char(b)) => a == b,
            (Value::Int32(a), Value::Int32(b)) => a == b,
            (Value::Int64(a), Value::Int64(b)) => a == b,
            (Value::Float64(a), Value::Float64(b)) => a.to_bits() == b.to_bits(),
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Null, Value::Null) => true,
            (Value::Array { elem: ea, items: a }, Value::Array { elem: eb, items: b }) => ea == eb && a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Value {
    pub fn char(c: char) -> Value {
        Value::Char(c as u32 as u16)
    }

    pub fn array(elem: TypeTag, items: Vec<Value>) -> Value {
        Value::Array { elem, items }
    }

    pub fn int_array(items: &[i32]) -> Value {
        Value::array(TypeTag::Int, items.iter().map(|v| Value::Int32(*v)).collect())
    }

    /// `None` for `null`, which inhabits every reference type.
    pub fn type_tag(&self) -> Option<TypeTag> {
        Some(match self {
            Value::Bool(_) => TypeTag::Boolean,
            Value::Char(_) => TypeTag::Char,
            Value::Int32(_) => TypeTag::Int,
            Value::Int64(_) => TypeTag::Long,
            Value::Float64(_) => TypeTag::Double,
            Value::Str(_) => TypeTag::String,
            Value::Null => return None,
            Value::Array { elem, .. } => TypeTag::Array(Box::new(elem.clone())),
        })
    }

    pub fn conforms_to(&self, ty: &TypeTag) -> bool {
        match (self, ty) {
            (Value::Null, t) => t.is_reference(),
            (Value::Array { elem, items }, TypeTag::Array(inner)) => {
                **inner == *elem && items.iter().all(|v| v.conforms_to(elem))
            }
            (v, t) => v.type_tag().as_ref() == Some(t),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Bool(b) => json!({"t": "bool", "v": b}),
            Value::Char(c) => json!({"t": "char", "v": c}),
            Value::Int32(v) => json!({"t": "int32", "v": v}),
            Value::Int64(v) => json!({"t": "int64", "v": v}),
            Value::Float64(x) if x.is_finite() => json!({"t": "float64", "v": x}),
            Value::Float64(x) => {
                let name = if x.is_nan() {
                    "NaN"
                } else if *x > 0.0 {
                    "Infinity"
                } else {
                    "-Infinity"
                };
                json!({"t": "float64", "v": name})
            }
            Value::Str(s) => json!({"t": "string", "v": s}),
            Value::Null => json!({"t": "null"}),
            Value::Array { elem, items } => json!({
                "t": "array",
                "elem": elem.java_name(),
                "v": items.iter().map(Value::to_json).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(j: &Json) -> Result<Value, String> {
        let obj = j.as_object().ok_or_else(|| format!("value must be a tagged object, got {j}"))?;
        let tag = obj.get("t").and_then(Json::as_str).ok_or("value object lacks string field \"t\"")?;
        let v = || obj.get("v").ok_or_else(|| format!("{tag} value lacks field \"v\""));
        let bad = |what: &str| format!("invalid {tag} payload: {what}");
        Ok(match tag {
            "bool" => Value::Bool(v()?.as_bool().ok_or_else(|| bad("expected boolean"))?),
            "char" => {
                let n = v()?.as_u64().ok_or_else(|| bad("expected code point"))?;
                Value::Char(u16::try_from(n).map_err(|_| bad("code point above 65535"))?)
            }
            "int32" => {
                let n = v()?.as_i64().ok_or_else(|| bad("expected integer"))?;
                Value::Int32(i32::try_from(n).map_err(|_| bad("out of 32-bit range"))?)
            }
            "int64" => Value::Int64(v()?.as_i64().ok_or_else(|| bad("expected integer"))?),
            "float64" => match v()? {
                Json::String(s) => Value::Float64(match s.as_str() {
                    "NaN" => f64::NAN,
                    "Infinity" => f64::INFINITY,
                    "-Infinity" => f64::NEG_INFINITY,
                    _ => return Err(bad("unknown special value")),
                }),
                n => Value::Float64(n.as_f64().ok_or_else(|| bad("expected number"))?),
            },
            "string" => Value::Str(v()?.as_str().ok_or_else(|| bad("expected string"))?.to_string()),
            "null" => Value::Null,
            "array" => {
                let elem = obj.get("elem").and_then(Json::as_str).ok_or_else(|| bad("missing \"elem\""))?;
                let elem = TypeTag::parse(elem);
                let items = v()?
                    .as_array()
                    .ok_or_else(|| bad("expected list"))?
                    .iter()
                    .map(Value::from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(i) = items.iter().position(|it| !it.conforms_to(&elem)) {
                    return Err(bad(&format!("element {i} is not a {elem}")));
                }
                Value::Array { elem, items }
            }
            other => return Err(format!("unknown value tag {other:?}")),
        })
    }

    /// Java expression producing this value, typed as `ty`.
    pub fn java_literal(&self, ty: &TypeTag) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Char(c) => java_char_literal(*c),
            Value::Int32(i32::MIN) => "Integer.MIN_VALUE".into(),
            Value::Int32(v) => v.to_string(),
            Value::Int64(i64::MIN) => "Long.MIN_VALUE".into(),
            Value::Int64(v) => format!("{v}L"),
            Value::Float64(x) => format!("Double.longBitsToDouble(0x{:016x}L)", x.to_bits()),
            Value::Str(s) => java_string_literal(s),
            Value::Null => format!("({}) null", ty.java_name()),
            Value::Array { elem, items } => {
                let parts: Vec<String> = items.iter().map(|v| v.java_literal(elem)).collect();
                format!("new {}[] {{{}}}", elem.java_name(), parts.join(", "))
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Char(c) => f.write_str(&java_char_literal(*c)),
            Value::Int32(v) => write!(f, "{v}"),
            Value::Int64(v) => write!(f, "{v}L"),
            Value::Float64(x) => write!(f, "{x:?}"),
            Value::Str(s) => f.write_str(&java_string_literal(s)),
            Value::Null => f.write_str("null"),
            Value::Array { items, .. } => {
                f.write_str("{")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = Json::deserialize(d)?;
        Value::from_json(&j).map_err(D::Error::custom)
    }
}

/// Parses the compact literal notation used on the command line:
/// `'b'`, `5`, `5L`, `2.5`, `true`, `"hi"`, `null`, `{1, 2, 3}`, or a
/// tagged JSON object.
pub fn parse_value_literal(text: &str) -> Result<Value, String> {
    let text = text.trim();
    if text.starts_with('{') && text.contains("\"t\"") {
        let j: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
        return Value::from_json(&j);
    }
    if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        let items = split_top_level(inner)
            .into_iter()
            .filter(|s| !s.trim().is_empty())
            .map(parse_value_literal)
            .collect::<Result<Vec<_>, _>>()?;
        let elem = items
            .iter()
            .find_map(Value::type_tag)
            .ok_or("cannot infer element type of an empty or all-null array literal; use the tagged JSON form")?;
        if items.iter().any(|v| !v.conforms_to(&elem)) {
            return Err("array literal is not homogeneous".into());
        }
        return Ok(Value::Array { elem, items });
    }
    match text {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        "null" => return Ok(Value::Null),
        _ => {}
    }
    use crate::jml::{parse_expression, Expr, UnaryOp};
    let e = parse_expression(text).map_err(|e| e.to_string())?;
    let (neg, e) = match e {
        Expr::Unary { op: UnaryOp::Neg, operand } => (true, *operand),
        e => (false, e),
    };
    let long = text.ends_with(['l', 'L']);
    Ok(match e {
        Expr::Char(c) if !neg => Value::Char(c),
        Expr::Str(s) if !neg => Value::Str(s),
        Expr::Int(v) => {
            let v = if neg { -v } else { v };
            match (i32::try_from(&v), long) {
                (Ok(n), false) => Value::Int32(n),
                _ => Value::Int64(i64::try_from(&v).map_err(|_| format!("integer {v} out of 64-bit range"))?),
            }
        }
        Expr::Float(x) => Value::Float64(if neg { -x } else { x }),
        _ => return Err(format!("not a value literal: {text}")),
    })
}

/// Splits on commas outside brackets and quotes.
pub(crate) fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == q {
                quote = None;
            }
            continue;
        }
        match ch {
            '\'' | '"' => quote = Some(ch),
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_json_shapes() {
        assert_eq!(Value::Int32(5).to_json(), json!({"t": "int32", "v": 5}));
        assert_eq!(Value::char('B').to_json(), json!({"t": "char", "v": 66}));
        assert_eq!(
            Value::int_array(&[1, 2]).to_json(),
            json!({"t": "array", "elem": "int", "v": [{"t": "int32", "v": 1}, {"t": "int32", "v": 2}]})
        );
        assert_eq!(Value::Float64(f64::NAN).to_json(), json!({"t": "float64", "v": "NaN"}));
        assert_eq!(Value::from_json(&json!({"t": "float64", "v": "NaN"})).unwrap(), Value::Float64(f64::NAN));
    }

    #[test]
    fn rejects_malformed_json_values() {
        assert!(Value::from_json(&json!({"t": "char", "v": 70000})).is_err());
        assert!(Value::from_json(&json!({"t": "int32", "v": 4294967296u64})).is_err());
        assert!(Value::from_json(&json!({"t": "array", "elem": "int", "v": [{"t": "char", "v": 1}]})).is_err());
        assert!(Value::from_json(&json!({"t": "widget"})).is_err());
        assert!(Value::from_json(&json!(5)).is_err());
    }

    #[test]
    fn conformance_allows_null_for_references_only() {
        assert!(Value::Null.conforms_to(&TypeTag::String));
        assert!(Value::Null.conforms_to(&TypeTag::parse("int[]")));
        assert!(!Value::Null.conforms_to(&TypeTag::Int));
        assert!(!Value::Int32(1).conforms_to(&TypeTag::Long));
    }

    #[test]
    fn float_equality_is_bitwise() {
        assert_ne!(Value::Float64(0.0), Value::Float64(-0.0));
        assert_eq!(Value::Float64(f64::NAN), Value::Float64(f64::NAN));
    }

    #[test]
    fn literal_shorthand() {
        assert_eq!(parse_value_literal("'b'").unwrap(), Value::char('b'));
        assert_eq!(parse_value_literal("-3").unwrap(), Value::Int32(-3));
        assert_eq!(parse_value_literal("3L").unwrap(), Value::Int64(3));
        assert_eq!(parse_value_literal("5000000000").unwrap(), Value::Int64(5_000_000_000));
        assert_eq!(parse_value_literal("{1, 2, 3}").unwrap(), Value::int_array(&[1, 2, 3]));
        assert_eq!(parse_value_literal("\"a,b\"").unwrap(), Value::Str("a,b".into()));
        assert_eq!(parse_value_literal(r#"{"t":"int64","v":7}"#).unwrap(), Value::Int64(7));
        assert!(parse_value_literal("{}").is_err());
    }

    #[test]
    fn java_literals() {
        assert_eq!(Value::char('b').java_literal(&TypeTag::Char), "'b'");
        assert_eq!(Value::Int32(i32::MIN).java_literal(&TypeTag::Int), "Integer.MIN_VALUE");
        assert_eq!(Value::Int64(3).java_literal(&TypeTag::Long), "3L");
        assert_eq!(Value::int_array(&[1, 2]).java_literal(&TypeTag::parse("int[]")), "new int[] {1, 2}");
        assert_eq!(Value::Null.java_literal(&TypeTag::String), "(String) null");
        assert_eq!(
            Value::Float64(1.0).java_literal(&TypeTag::Double),
            "Double.longBitsToDouble(0x3ff0000000000000L)"
        );
    }
}
