use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::value::{TypeTag, Value};

pub const SUITE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TypeTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodSignature {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeTag,
}

impl MethodSignature {
    pub fn new(name: &str, params: &[(&str, TypeTag)], return_type: TypeTag) -> MethodSignature {
        MethodSignature {
            name: name.to_string(),
            params: params.iter().map(|(n, t)| Param { name: n.to_string(), ty: t.clone() }).collect(),
            return_type,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Rejects `void` and opaque object return types.
    pub fn validate(&self) -> Result<(), SuiteError> {
        if !self.return_type.is_supported() {
            return Err(SuiteError::UnsupportedReturnType(self.return_type.java_name()));
        }
        Ok(())
    }

    /// Checks arity and per-position types of an input tuple.
    pub fn check_inputs(&self, inputs: &[Value]) -> Result<(), SuiteError> {
        if inputs.len() != self.params.len() {
            return Err(SuiteError::Arity { expected: self.params.len(), found: inputs.len() });
        }
        for (p, v) in self.params.iter().zip(inputs) {
            if !v.conforms_to(&p.ty) {
                return Err(SuiteError::TypeMismatch { what: p.name.clone(), expected: p.ty.java_name(), value: v.to_string() });
            }
        }
        Ok(())
    }

    pub fn check_output(&self, output: &Value) -> Result<(), SuiteError> {
        if !output.conforms_to(&self.return_type) {
            return Err(SuiteError::TypeMismatch {
                what: "\\result".into(),
                expected: self.return_type.java_name(),
                value: output.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub inputs: Vec<Value>,
    pub output: Value,
}

impl Pair {
    pub fn new(inputs: Vec<Value>, output: Value) -> Pair {
        Pair { inputs, output }
    }
}

/// Valid input/output pairs and explicitly provided invalid inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TestSuite {
    pub schema_version: u32,
    pub signature: MethodSignature,
    pub valid_pairs: Vec<Pair>,
    #[serde(default)]
    pub invalid_inputs: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("return type `{0}` cannot be evaluated")]
    UnsupportedReturnType(String),
    #[error("expected {expected} inputs, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("`{what}` expects {expected}, got {value}")]
    TypeMismatch { what: String, expected: String, value: String },
    #[error("unsupported suite schema version {0}")]
    SchemaVersion(u32),
    #[error("suite has no valid pairs")]
    EmptySuite,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed suite: {0}")]
    Format(String),
}

impl TestSuite {
    pub fn new(signature: MethodSignature, valid_pairs: Vec<Pair>, invalid_inputs: Vec<Vec<Value>>) -> TestSuite {
        TestSuite { schema_version: SUITE_SCHEMA_VERSION, signature, valid_pairs, invalid_inputs }
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        if self.schema_version != SUITE_SCHEMA_VERSION {
            return Err(SuiteError::SchemaVersion(self.schema_version));
        }
        self.signature.validate()?;
        for p in &self.valid_pairs {
            self.signature.check_inputs(&p.inputs)?;
            self.signature.check_output(&p.output)?;
        }
        for i in &self.invalid_inputs {
            self.signature.check_inputs(i)?;
        }
        Ok(())
    }

    /// Distinct valid inputs in first-occurrence order.
    pub fn valid_inputs(&self) -> Vec<Vec<Value>> {
        let mut out: Vec<Vec<Value>> = Vec::new();
        for p in &self.valid_pairs {
            if !out.contains(&p.inputs) {
                out.push(p.inputs.clone());
            }
        }
        out
    }

    /// The first `max_pairs` valid pairs; invalid inputs are kept.
    pub fn truncated(&self, max_pairs: usize) -> TestSuite {
        let mut s = self.clone();
        s.valid_pairs.truncate(max_pairs);
        s
    }

    pub fn from_json_str(text: &str) -> Result<TestSuite, SuiteError> {
        let suite: TestSuite = serde_json::from_str(text).map_err(|e| SuiteError::Format(e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("suite serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<TestSuite, SuiteError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SuiteError::Io { path: path.display().to_string(), message: e.to_string() })?;
        TestSuite::from_json_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), SuiteError> {
        std::fs::write(path, self.to_json_string())
            .map_err(|e| SuiteError::Io { path: path.display().to_string(), message: e.to_string() })
    }
}
