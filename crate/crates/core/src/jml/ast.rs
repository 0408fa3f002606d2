use num_bigint::BigInt;

/// Expression tree for the JML subset accepted in `requires`/`ensures`
/// clauses. Grouping parentheses are not represented.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Bool(bool),
    /// UTF-16 code unit.
    Char(u16),
    /// Integer literals are unbounded; the lexer only produces non-negative
    /// values, negation is a [`UnaryOp::Neg`] node.
    Int(BigInt),
    Float(f64),
    Str(String),
    Null,
    Ident(String),
    Result,
    Old(Box<Expr>),
    Index { base: Box<Expr>, index: Box<Expr> },
    Length(Box<Expr>),
    Cast { ty: PrimType, expr: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Cond { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Quantified {
        kind: Quantifier,
        var: String,
        var_type: PrimType,
        /// `None` for the two-part form `(\forall int i; body)`.
        range: Option<Box<Expr>>,
        body: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "\\forall",
            Quantifier::Exists => "\\exists",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimType {
    Boolean,
    Char,
    Byte,
    Short,
    Int,
    Long,
    Float,
    Double,
}

impl PrimType {
    pub fn from_keyword(word: &str) -> Option<PrimType> {
        Some(match word {
            "boolean" => PrimType::Boolean,
            "char" => PrimType::Char,
            "byte" => PrimType::Byte,
            "short" => PrimType::Short,
            "int" => PrimType::Int,
            "long" => PrimType::Long,
            "float" => PrimType::Float,
            "double" => PrimType::Double,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PrimType::Boolean => "boolean",
            PrimType::Char => "char",
            PrimType::Byte => "byte",
            PrimType::Short => "short",
            PrimType::Int => "int",
            PrimType::Long => "long",
            PrimType::Float => "float",
            PrimType::Double => "double",
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, PrimType::Byte | PrimType::Short | PrimType::Int | PrimType::Long)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
    BitNot,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
            UnaryOp::BitNot => "~",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    UShr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitOr,
    BitXor,
    And,
    Or,
    Implies,
    RevImplies,
    Equiv,
    NotEquiv,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 23] = [
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Shl,
        BinaryOp::Shr,
        BinaryOp::UShr,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::BitAnd,
        BinaryOp::BitOr,
        BinaryOp::BitXor,
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Implies,
        BinaryOp::RevImplies,
        BinaryOp::Equiv,
        BinaryOp::NotEquiv,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::UShr => ">>>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
            BinaryOp::Implies => "==>",
            BinaryOp::RevImplies => "<==",
            BinaryOp::Equiv => "<==>",
            BinaryOp::NotEquiv => "<=!=>",
        }
    }
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::Unary { op, operand: Box::new(operand) }
    }

    /// Left-nested conjunction of `parts`; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().reduce(|acc, e| Expr::binary(BinaryOp::And, acc, e)).unwrap_or(Expr::Bool(true))
    }

    /// Direct children in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Bool(_)
            | Expr::Char(_)
            | Expr::Int(_)
            | Expr::Float(_)
            | Expr::Str(_)
            | Expr::Null
            | Expr::Ident(_)
            | Expr::Result => vec![],
            Expr::Old(e) | Expr::Length(e) => vec![e],
            Expr::Cast { expr, .. } => vec![expr],
            Expr::Unary { operand, .. } => vec![operand],
            Expr::Index { base, index } => vec![base, index],
            Expr::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::Cond { cond, then, otherwise } => vec![cond, then, otherwise],
            Expr::Quantified { range, body, .. } => {
                range.iter().map(|r| r.as_ref()).chain(std::iter::once(body.as_ref())).collect()
            }
        }
    }

    pub fn mentions_result(&self) -> bool {
        matches!(self, Expr::Result) || self.children().into_iter().any(Expr::mentions_result)
    }

    pub fn mentions_old(&self) -> bool {
        matches!(self, Expr::Old(_)) || self.children().into_iter().any(Expr::mentions_old)
    }

    /// Identifiers not bound by an enclosing quantifier, in first-use order.
    pub fn free_identifiers(&self) -> Vec<String> {
        fn walk(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match e {
                Expr::Ident(name) => {
                    if !bound.contains(name) && !out.contains(name) {
                        out.push(name.clone());
                    }
                }
                Expr::Quantified { var, range, body, .. } => {
                    bound.push(var.clone());
                    if let Some(r) = range {
                        walk(r, bound, out);
                    }
                    walk(body, bound, out);
                    bound.pop();
                }
                other => other.children().into_iter().for_each(|c| walk(c, bound, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Rewrites the tree bottom-up.
    pub fn transform(self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Old(e) => Expr::Old(Box::new(e.transform(f))),
            Expr::Length(e) => Expr::Length(Box::new(e.transform(f))),
            Expr::Cast { ty, expr } => Expr::Cast { ty, expr: Box::new(expr.transform(f)) },
            Expr::Unary { op, operand } => Expr::Unary { op, operand: Box::new(operand.transform(f)) },
            Expr::Index { base, index } => {
                Expr::Index { base: Box::new(base.transform(f)), index: Box::new(index.transform(f)) }
            }
            Expr::Binary { op, lhs, rhs } => {
                Expr::Binary { op, lhs: Box::new(lhs.transform(f)), rhs: Box::new(rhs.transform(f)) }
            }
            Expr::Cond { cond, then, otherwise } => Expr::Cond {
                cond: Box::new(cond.transform(f)),
                then: Box::new(then.transform(f)),
                otherwise: Box::new(otherwise.transform(f)),
            },
            Expr::Quantified { kind, var, var_type, range, body } => Expr::Quantified {
                kind,
                var,
                var_type,
                range: range.map(|r| Box::new(r.transform(f))),
                body: Box::new(body.transform(f)),
            },
            leaf => leaf,
        };
        f(rebuilt)
    }
}
