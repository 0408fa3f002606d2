//! Test data: values, suites, mutants and random inputs.

pub mod mutate;
pub mod random;
pub mod reference;
pub mod suite;
pub mod value;

pub use mutate::{build_mutant_pool, mutate_output, ArrayOp, CharDelta, FloatOp, IntDelta, MutantPair, MutantPool, MutationConfig, MutationError, PoolWarning, StringOp};
pub use random::{generate_random_inputs, RandomError};
pub use suite::{MethodSignature, Pair, Param, SuiteError, TestSuite};
pub use value::{parse_value_literal, TypeTag, Value};
