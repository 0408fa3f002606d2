//! JML expressions: syntax tree, parser, printer, evaluator and method
//! contract extraction.

pub mod ast;
pub mod contract;
pub mod eval;
pub mod parser;
pub mod printer;

pub use ast::{BinaryOp, Expr, PrimType, Quantifier, UnaryOp};
pub use contract::{extract_contract, strip_annotations, Contract, ContractError, ExtractedContract, MethodDecl};
pub use eval::{evaluate, ArithmeticMode, Env, EvalErrorReason, EvalOptions, Verdict};
pub use parser::{parse_expression, ParseError};
