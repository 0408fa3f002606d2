//! Output capture by running the reference Java method on each input.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use thiserror::Error;

use super::suite::{MethodSignature, Pair};
use super::value::{TypeTag, Value};
use crate::java::tokenize;
use crate::jml::contract::{find_method_declarations, top_level_type_names};
use crate::process::{run_with_timeout, ProcessError};

pub const DRIVER_CLASS: &str = "__RefDriver";
pub const DEFAULT_REFERENCE_TIMEOUT: Duration = Duration::from_secs(5);
const COMPILE_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JavaToolchain {
    pub javac: PathBuf,
    pub java: PathBuf,
}

impl JavaToolchain {
    /// `$JAVA_HOME/bin` first, then `PATH`.
    pub fn discover() -> Result<JavaToolchain, ReferenceError> {
        if let Some(home) = std::env::var_os("JAVA_HOME") {
            let bin = Path::new(&home).join("bin");
            let (javac, java) = (bin.join("javac"), bin.join("java"));
            if javac.is_file() && java.is_file() {
                return Ok(JavaToolchain { javac, java });
            }
        }
        match (which::which("javac"), which::which("java")) {
            (Ok(javac), Ok(java)) => Ok(JavaToolchain { javac, java }),
            _ => Err(ReferenceError::BackendUnavailable("javac/java not found on JAVA_HOME or PATH".into())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("Java toolchain unavailable: {0}")]
    BackendUnavailable(String),
    #[error("cannot locate method: {0}")]
    Setup(String),
    #[error("compilation failed:\n{0}")]
    CompileError(String),
    #[error("input {index} crashed:\n{stderr}")]
    RuntimeCrash { index: usize, stderr: String },
    #[error("input {index} exceeded {limit:?}")]
    Timeout { index: usize, limit: Duration },
    #[error("input {index} produced unreadable output: {message}")]
    BadOutput { index: usize, message: String },
    #[error("input {index}: {message}")]
    BadInput { index: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// Class, method and staticness needed to call the reference method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallTarget {
    pub class_name: String,
    pub method_name: String,
    pub is_static: bool,
}

pub fn locate_call_target(source: &str, method: &str) -> Result<CallTarget, ReferenceError> {
    let tokens = tokenize(source).map_err(|e| ReferenceError::Setup(e.to_string()))?;
    let decls = find_method_declarations(source, &tokens, method);
    let decl = match decls.as_slice() {
        [d] => d,
        [] => return Err(ReferenceError::Setup(format!("method `{method}` not found"))),
        _ => return Err(ReferenceError::Setup(format!("method `{method}` is overloaded"))),
    };
    let class_name = top_level_type_names(source, &tokens)
        .into_iter()
        .filter(|(idx, _)| *idx < decl.name_token)
        .last()
        .map(|(_, name)| name)
        .ok_or_else(|| ReferenceError::Setup("no enclosing class".into()))?;
    let is_static = tokens[decl.first_token..decl.name_token].iter().any(|t| t.text(source) == "static");
    Ok(CallTarget { class_name, method_name: method.to_string(), is_static })
}

fn collect_array_types(ty: &TypeTag, out: &mut Vec<TypeTag>) {
    if let TypeTag::Array(inner) = ty {
        collect_array_types(inner, out);
        if !out.contains(ty) {
            out.push(ty.clone());
        }
    }
}

const SCALAR_ENCODERS: &str = r#"    static void put(StringBuilder sb, boolean v) { sb.append("{\"t\":\"bool\",\"v\":").append(v).append('}'); }
    static void put(StringBuilder sb, char v) { sb.append("{\"t\":\"char\",\"v\":").append((int) v).append('}'); }
    static void put(StringBuilder sb, int v) { sb.append("{\"t\":\"int32\",\"v\":").append(v).append('}'); }
    static void put(StringBuilder sb, long v) { sb.append("{\"t\":\"int64\",\"v\":").append(v).append('}'); }
    static void put(StringBuilder sb, double v) {
        sb.append("{\"t\":\"float64\",\"v\":");
        if (Double.isNaN(v)) sb.append("\"NaN\"");
        else if (Double.isInfinite(v)) sb.append(v > 0 ? "\"Infinity\"" : "\"-Infinity\"");
        else sb.append(Double.toString(v));
        sb.append('}');
    }
    static void put(StringBuilder sb, String v) {
        if (v == null) { sb.append("{\"t\":\"null\"}"); return; }
        sb.append("{\"t\":\"string\",\"v\":\"");
        for (int i = 0; i < v.length(); i++) {
            char c = v.charAt(i);
            if (c < 0x20 || c > 0x7e || c == '"' || c == '\\') sb.append(String.format("\\u%04x", (int) c));
            else sb.append(c);
        }
        sb.append("\"}");
    }
"#;

/// Source of the driver class. `main` takes the input index, calls the
/// reference method on that input and prints the result as tagged JSON.
pub fn render_driver(target: &CallTarget, sig: &MethodSignature, inputs: &[Vec<Value>]) -> Result<String, ReferenceError> {
    let mut cases = String::new();
    for (i, tuple) in inputs.iter().enumerate() {
        sig.check_inputs(tuple).map_err(|e| ReferenceError::BadInput { index: i, message: e.to_string() })?;
        let args: Vec<String> = tuple.iter().zip(&sig.params).map(|(v, p)| v.java_literal(&p.ty)).collect();
        let receiver = if target.is_static { target.class_name.clone() } else { format!("new {}()", target.class_name) };
        cases.push_str(&format!(
            "            case {i}: put(sb, {receiver}.{}({})); break;\n",
            target.method_name,
            args.join(", ")
        ));
    }
    let mut arrays = Vec::new();
    collect_array_types(&sig.return_type, &mut arrays);
    let mut encoders = SCALAR_ENCODERS.to_string();
    for ty in arrays {
        let TypeTag::Array(elem) = &ty else { unreachable!() };
        encoders.push_str(&format!(
            "    static void put(StringBuilder sb, {java} v) {{\n        if (v == null) {{ sb.append(\"{{\\\"t\\\":\\\"null\\\"}}\"); return; }}\n        sb.append(\"{{\\\"t\\\":\\\"array\\\",\\\"elem\\\":\\\"{elem}\\\",\\\"v\\\":[\");\n        for (int i = 0; i < v.length; i++) {{ if (i > 0) sb.append(','); put(sb, v[i]); }}\n        sb.append(\"]}}\");\n    }}\n",
            java = ty.java_name(),
            elem = elem.java_name(),
        ));
    }
    Ok(format!(
        "public class {DRIVER_CLASS} {{\n    public static void main(String[] args) throws Throwable {{\n        StringBuilder sb = new StringBuilder();\n        switch (Integer.parseInt(args[0])) {{\n{cases}            default: throw new IllegalArgumentException(args[0]);\n        }}\n        System.out.println(sb);\n    }}\n\n{encoders}}}\n"
    ))
}

/// Compiles `source` with a generated driver and runs one JVM per input.
/// Pairs come back in input order.
pub fn execute_reference(
    source: &str,
    sig: &MethodSignature,
    inputs: &[Vec<Value>],
    toolchain: Option<&JavaToolchain>,
    timeout: Duration,
) -> Result<Vec<Pair>, ReferenceError> {
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    let discovered;
    let tc = match toolchain {
        Some(tc) => tc,
        None => {
            discovered = JavaToolchain::discover()?;
            &discovered
        }
    };
    let target = locate_call_target(source, &sig.name)?;
    let driver = render_driver(&target, sig, inputs)?;
    let dir = tempfile::tempdir().map_err(|e| ReferenceError::Io(e.to_string()))?;
    let src_path = dir.path().join(format!("{}.java", target.class_name));
    let drv_path = dir.path().join(format!("{DRIVER_CLASS}.java"));
    std::fs::write(&src_path, source).map_err(|e| ReferenceError::Io(format!("{}: {e}", src_path.display())))?;
    std::fs::write(&drv_path, driver).map_err(|e| ReferenceError::Io(format!("{}: {e}", drv_path.display())))?;

    let compile = run_with_timeout(
        Command::new(&tc.javac).arg("-d").arg(dir.path()).arg(&src_path).arg(&drv_path),
        COMPILE_TIMEOUT,
    )
    .map_err(|e| match e {
        ProcessError::Spawn { .. } => ReferenceError::BackendUnavailable(e.to_string()),
        other => ReferenceError::CompileError(other.to_string()),
    })?;
    if !compile.success() {
        return Err(ReferenceError::CompileError(compile.combined()));
    }

    let mut pairs = Vec::with_capacity(inputs.len());
    for (index, tuple) in inputs.iter().enumerate() {
        let run = run_with_timeout(
            Command::new(&tc.java).arg("-cp").arg(dir.path()).arg(DRIVER_CLASS).arg(index.to_string()),
            timeout,
        )
        .map_err(|e| match e {
            ProcessError::Timeout { limit, .. } => ReferenceError::Timeout { index, limit },
            ProcessError::Spawn { .. } => ReferenceError::BackendUnavailable(e.to_string()),
            other => ReferenceError::Io(other.to_string()),
        })?;
        if !run.success() {
            return Err(ReferenceError::RuntimeCrash { index, stderr: run.stderr });
        }
        let line = run.stdout.lines().last().unwrap_or("");
        let json: serde_json::Value =
            serde_json::from_str(line).map_err(|e| ReferenceError::BadOutput { index, message: e.to_string() })?;
        let output = Value::from_json(&json).map_err(|message| ReferenceError::BadOutput { index, message })?;
        pairs.push(Pair::new(tuple.clone(), output));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "public class ChangeCase {\n    public char changeCase(char c) { return c; }\n}\n";

    #[test]
    fn locates_instance_and_static_targets() {
        let t = locate_call_target(SRC, "changeCase").unwrap();
        assert_eq!(t, CallTarget { class_name: "ChangeCase".into(), method_name: "changeCase".into(), is_static: false });
        let s = "class Util { static int[] f(int[] a) { return a; } }";
        assert!(locate_call_target(s, "f").unwrap().is_static);
        assert!(matches!(locate_call_target(s, "g"), Err(ReferenceError::Setup(_))));
    }

    #[test]
    fn driver_has_one_case_per_input_and_array_encoders() {
        let sig = MethodSignature::new("f", &[("a", TypeTag::parse("int[]"))], TypeTag::parse("int[][]"));
        let target = CallTarget { class_name: "Util".into(), method_name: "f".into(), is_static: true };
        let inputs = vec![vec![Value::int_array(&[1, 2])], vec![Value::Null]];
        let d = render_driver(&target, &sig, &inputs).unwrap();
        assert!(d.contains("case 0: put(sb, Util.f(new int[] {1, 2})); break;"));
        assert!(d.contains("case 1: put(sb, Util.f((int[]) null)); break;"));
        assert!(d.contains("static void put(StringBuilder sb, int[] v)"));
        assert!(d.contains("static void put(StringBuilder sb, int[][] v)"));
        assert!(d.contains("\\\"elem\\\":\\\"int[]\\\""));
    }

    #[test]
    fn driver_rejects_ill_typed_inputs() {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let target = locate_call_target(SRC, "changeCase").unwrap();
        let err = render_driver(&target, &sig, &[vec![Value::Int32(1)]]).unwrap_err();
        assert!(matches!(err, ReferenceError::BadInput { index: 0, .. }));
    }

    #[test]
    fn empty_inputs_need_no_toolchain() {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        assert!(execute_reference(SRC, &sig, &[], None, DEFAULT_REFERENCE_TIMEOUT).unwrap().is_empty());
    }

    #[test]
    fn missing_toolchain_is_backend_unavailable() {
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let tc = JavaToolchain { javac: "/nonexistent/javac".into(), java: "/nonexistent/java".into() };
        let r = execute_reference(SRC, &sig, &[vec![Value::char('b')]], Some(&tc), DEFAULT_REFERENCE_TIMEOUT);
        assert!(matches!(r, Err(ReferenceError::BackendUnavailable(_))));
    }

    // Runs only where a JDK is installed.
    #[test]
    fn captures_outputs_with_a_real_jdk() {
        let Ok(tc) = JavaToolchain::discover() else { return };
        let src = include_str!("../../tests/fixtures/changecase/ChangeCase.java");
        let sig = MethodSignature::new("changeCase", &[("c", TypeTag::Char)], TypeTag::Char);
        let pairs = execute_reference(src, &sig, &[vec![Value::char('b')]], Some(&tc), DEFAULT_REFERENCE_TIMEOUT).unwrap();
        assert_eq!(pairs, vec![Pair::new(vec![Value::char('b')], Value::char('B'))]);
        let thrower = "public class T { public static int f(int x) { if (x < 0) throw new IllegalArgumentException(); return x; } }";
        let sig = MethodSignature::new("f", &[("x", TypeTag::Int)], TypeTag::Int);
        let r = execute_reference(thrower, &sig, &[vec![Value::Int32(-1)]], Some(&tc), DEFAULT_REFERENCE_TIMEOUT);
        assert!(matches!(r, Err(ReferenceError::RuntimeCrash { index: 0, .. })));
    }
}
