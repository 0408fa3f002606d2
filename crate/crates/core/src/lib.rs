//! Specification inference and evaluation for Java methods with JML
//! contracts.

pub mod agent;
pub mod benchkit;
pub mod harness;
pub mod java;
pub mod jml;
pub mod process;
pub mod testkit;
pub mod verify;

pub use jml::{parse_expression, Contract, Expr, Verdict};
pub use testkit::{TypeTag, Value};
