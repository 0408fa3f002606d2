use serde::{Deserialize, Serialize};

use crate::jml::{Contract, Expr};
use crate::testkit::{MethodSignature, SuiteError, TypeTag, Value};

pub const STUB_CLASS: &str = "__SpecHarnessStub";
/// Local that stands in for `\result` in rendered stubs.
pub const RESULT_LOCAL: &str = "__result";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StubKind {
    /// `{true} params := inputs; result := output {ensures}`
    Post,
    /// `{true} params := inputs {requires}`
    Pre,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub name: String,
    pub ty: TypeTag,
    pub value: Value,
}

/// One Hoare-triple check with concrete assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct StubCheck {
    pub kind: StubKind,
    /// Parameters in signature order, then the result for `Post` stubs.
    pub assignments: Vec<Assignment>,
    pub predicate: Expr,
    pub rendered_source: Option<String>,
}

impl StubCheck {
    pub fn params(&self) -> impl Iterator<Item = (String, Value)> + '_ {
        self.assignments.iter().filter(|a| a.name != RESULT_LOCAL).map(|a| (a.name.clone(), a.value.clone()))
    }

    pub fn result(&self) -> Option<&Value> {
        self.assignments.iter().find(|a| a.name == RESULT_LOCAL).map(|a| &a.value)
    }
}

fn bind_params(sig: &MethodSignature, inputs: &[Value]) -> Result<Vec<Assignment>, SuiteError> {
    sig.check_inputs(inputs)?;
    Ok(sig
        .params
        .iter()
        .zip(inputs)
        .map(|(p, v)| Assignment { name: p.name.clone(), ty: p.ty.clone(), value: v.clone() })
        .collect())
}

/// Stub for one valid pair against the postcondition.
pub fn build_post_stub(
    sig: &MethodSignature,
    contract: &Contract,
    inputs: &[Value],
    output: &Value,
    render: bool,
) -> Result<StubCheck, SuiteError> {
    let mut assignments = bind_params(sig, inputs)?;
    sig.check_output(output)?;
    assignments.push(Assignment { name: RESULT_LOCAL.into(), ty: sig.return_type.clone(), value: output.clone() });
    let mut stub = StubCheck { kind: StubKind::Post, assignments, predicate: contract.postcondition(), rendered_source: None };
    if render {
        stub.rendered_source = Some(render_stub(&stub));
    }
    Ok(stub)
}

/// Stub for one input against the precondition.
pub fn build_pre_stub(sig: &MethodSignature, contract: &Contract, inputs: &[Value], render: bool) -> Result<StubCheck, SuiteError> {
    let assignments = bind_params(sig, inputs)?;
    let mut stub = StubCheck { kind: StubKind::Pre, assignments, predicate: contract.precondition(), rendered_source: None };
    if render {
        stub.rendered_source = Some(render_stub(&stub));
    }
    Ok(stub)
}

/// `\result` becomes the result local; `\old(e)` becomes `e` because the
/// stub never modifies its locals.
pub fn stub_predicate(e: &Expr) -> Expr {
    e.clone().transform(&mut |node| match node {
        Expr::Result => Expr::Ident(RESULT_LOCAL.into()),
        Expr::Old(inner) => *inner,
        other => other,
    })
}

/// Java class whose method body is the assignments followed by the assert.
pub fn render_stub(stub: &StubCheck) -> String {
    let mut body = String::new();
    for a in &stub.assignments {
        body.push_str(&format!("        {} {} = {};\n", a.ty.java_name(), a.name, a.value.java_literal(&a.ty)));
    }
    body.push_str(&format!("        //@ assert {};\n", stub_predicate(&stub.predicate)));
    format!("public class {STUB_CLASS} {{\n    public static void check() {{\n{body}    }}\n}}\n")
}
