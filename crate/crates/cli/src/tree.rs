use std::fmt::Write;

use veriact_core::jml::{Contract, Expr, MethodDecl};

/// Indented outline of a contract: each clause fully parenthesized, then one
/// node per line with children two spaces deeper than their parent.
pub fn contract_tree(method: &MethodDecl, contract: &Contract) -> String {
    let params: Vec<String> = method.params.iter().map(|(t, n)| format!("{t} {n}")).collect();
    let mut out = format!("method {} {}({})\n", method.return_type, method.name, params.join(", "));
    for (label, clauses) in [("requires", &contract.requires), ("ensures", &contract.ensures)] {
        if clauses.is_empty() {
            let _ = writeln!(out, "{label}: true");
        }
        for (i, e) in clauses.iter().enumerate() {
            let _ = writeln!(out, "{label}[{i}]: {e}");
            node(e, 1, &mut out);
        }
    }
    out
}

fn node(e: &Expr, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let (label, children): (String, Vec<&Expr>) = match e {
        Expr::Old(inner) => ("\\old".into(), vec![inner]),
        Expr::Index { base, index } => ("index".into(), vec![base, index]),
        Expr::Length(inner) => ("length".into(), vec![inner]),
        Expr::Cast { ty, expr } => (format!("cast {}", ty.keyword()), vec![expr]),
        Expr::Unary { op, operand } => (format!("unary {}", op.symbol()), vec![operand]),
        Expr::Binary { op, lhs, rhs } => (format!("binary {}", op.symbol()), vec![lhs, rhs]),
        Expr::Cond { cond, then, otherwise } => ("conditional".into(), vec![cond, then, otherwise]),
        Expr::Quantified { kind, var, var_type, range, body } => {
            let mut kids: Vec<&Expr> = range.iter().map(|r| r.as_ref()).collect();
            kids.push(body);
            (format!("{} {} {var}", kind.keyword(), var_type.keyword()), kids)
        }
        leaf => (leaf.to_string(), vec![]),
    };
    let _ = writeln!(out, "{pad}{label}");
    for c in children {
        node(c, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use veriact_core::jml::extract_contract;

    #[test]
    fn outline_of_a_small_contract() {
        let src = "class A {\n  //@ requires n >= 0;\n  //@ ensures (\\forall int i; 0 <= i && i < n; \\result[i] == -i);\n  int[] f(int n) { return null; }\n}\n";
        let x = extract_contract(src, "f").unwrap();
        assert_eq!(
            contract_tree(&x.method, &x.contract),
            "method int[] f(int n)\n\
             requires[0]: (n >= 0)\n  binary >=\n    n\n    0\n\
             ensures[0]: (\\forall int i; ((0 <= i) && (i < n)); (\\result[i] == (-i)))\n  \\forall int i\n    binary &&\n      binary <=\n        0\n        i\n      binary <\n        i\n        n\n    binary ==\n      index\n        \\result\n        i\n      unary -\n        i\n"
        );
    }

    #[test]
    fn missing_clauses_read_as_true() {
        let src = "class A {\n  //@ ensures \\result;\n  boolean f() { return true; }\n}\n";
        let x = extract_contract(src, "f").unwrap();
        assert!(contract_tree(&x.method, &x.contract).contains("requires: true\nensures[0]: \\result\n  \\result\n"));
    }
}
