use num_bigint::BigInt;
use proptest::prelude::*;
use veriact_core::jml::{parse_expression, BinaryOp, Expr, PrimType, Quantifier, UnaryOp};
use veriact_core::testkit::{TypeTag, Value};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        any::<bool>().prop_map(Expr::Bool),
        any::<u16>().prop_map(Expr::Char),
        any::<i64>().prop_map(|v| Expr::Int(BigInt::from(v))),
        (0.0f64..1e300).prop_map(Expr::Float),
        "[ -~\u{e9}\u{4e2d}\n\t]{0,6}".prop_map(Expr::Str),
        Just(Expr::Null),
        prop::sample::select(vec!["a", "b", "xs", "n", "value_1"]).prop_map(Expr::ident),
        Just(Expr::Result),
    ]
}

fn prim() -> impl Strategy<Value = PrimType> {
    prop::sample::select(vec![
        PrimType::Boolean,
        PrimType::Char,
        PrimType::Byte,
        PrimType::Short,
        PrimType::Int,
        PrimType::Long,
        PrimType::Float,
        PrimType::Double,
    ])
}

fn integral() -> impl Strategy<Value = PrimType> {
    prop::sample::select(vec![PrimType::Int, PrimType::Long, PrimType::Short, PrimType::Byte])
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 64, 3, |inner| {
        let b = || inner.clone().prop_map(Box::new);
        prop_oneof![
            b().prop_map(Expr::Old),
            (b(), b()).prop_map(|(base, index)| Expr::Index { base, index }),
            b().prop_map(Expr::Length),
            (prim(), b()).prop_map(|(ty, expr)| Expr::Cast { ty, expr }),
            (prop::sample::select(vec![UnaryOp::Not, UnaryOp::Neg, UnaryOp::BitNot]), b())
                .prop_map(|(op, operand)| Expr::Unary { op, operand }),
            (prop::sample::select(BinaryOp::ALL.to_vec()), b(), b())
                .prop_map(|(op, lhs, rhs)| Expr::Binary { op, lhs, rhs }),
            (b(), b(), b()).prop_map(|(cond, then, otherwise)| Expr::Cond { cond, then, otherwise }),
            (
                prop::sample::select(vec![Quantifier::Forall, Quantifier::Exists]),
                prop::sample::select(vec!["i", "j", "k"]),
                integral(),
                prop::option::of(b()),
                b()
            )
                .prop_map(|(kind, var, var_type, range, body)| Expr::Quantified {
                    kind,
                    var: var.to_string(),
                    var_type,
                    range,
                    body,
                }),
        ]
    })
}

fn value() -> impl Strategy<Value = Value> {
    let scalar = prop_oneof![
        any::<bool>().prop_map(Value::Bool),
        any::<u16>().prop_map(Value::Char),
        any::<i32>().prop_map(Value::Int32),
        any::<i64>().prop_map(Value::Int64),
        any::<f64>().prop_map(Value::Float64),
        ".{0,8}".prop_map(Value::Str),
        Just(Value::Null),
    ];
    prop_oneof![
        4 => scalar,
        1 => prop::collection::vec(any::<i32>(), 0..6)
            .prop_map(|v| Value::array(TypeTag::Int, v.into_iter().map(Value::Int32).collect())),
        1 => prop::collection::vec(any::<u16>(), 0..6)
            .prop_map(|v| Value::array(TypeTag::Char, v.into_iter().map(Value::Char).collect())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printed_expressions_reparse_to_the_same_tree(e in expr()) {
        let text = e.to_string();
        let back = parse_expression(&text);
        prop_assert_eq!(back.as_ref().ok(), Some(&e), "printed: {}", text);
    }

    #[test]
    fn values_survive_json(v in value()) {
        let back = Value::from_json(&v.to_json()).unwrap();
        prop_assert_eq!(back, v);
    }
}
