use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::suite::MethodSignature;
use super::value::{TypeTag, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomError {
    #[error("cannot generate values of type `{0}`")]
    UnsupportedType(String),
}

const MAX_ARRAY_LEN: usize = 8;
const MAX_STRING_LEN: usize = 8;

/// `n` input tuples for `sig`, reproducible per `seed`.
///
/// Every scalar draw picks each boundary value (0, ±1, type extremes) with
/// probability 0.1; arrays and strings are empty with probability 0.1.
pub fn generate_random_inputs(sig: &MethodSignature, n: usize, seed: u64) -> Result<Vec<Vec<Value>>, RandomError> {
    for p in &sig.params {
        if !p.ty.is_supported() {
            return Err(RandomError::UnsupportedType(p.ty.java_name()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sig.params.iter().map(|p| random_value(&p.ty, &mut rng)).collect()).collect())
}

// Each boundary value with probability 0.1, otherwise `None`.
fn boundary<T: Copy>(rng: &mut impl Rng, values: &[T]) -> Option<T> {
    let slot = rng.gen_range(0..10usize);
    values.get(slot).copied()
}

/// One value of type `ty`. Panics on unsupported types.
pub fn random_value(ty: &TypeTag, rng: &mut impl Rng) -> Value {
    match ty {
        TypeTag::Boolean => Value::Bool(rng.gen()),
        TypeTag::Char => {
            let c = boundary(rng, &[0u16, 1, u16::MAX])
                .unwrap_or_else(|| if rng.gen_bool(0.7) { rng.gen_range(0x20..0x7F) } else { rng.gen() });
            Value::Char(c)
        }
        TypeTag::Int => {
            let v = boundary(rng, &[0, 1, -1, i32::MIN, i32::MAX])
                .unwrap_or_else(|| if rng.gen_bool(0.5) { rng.gen_range(-100..=100) } else { rng.gen() });
            Value::Int32(v)
        }
        TypeTag::Long => {
            let v = boundary(rng, &[0, 1, -1, i64::MIN, i64::MAX])
                .unwrap_or_else(|| if rng.gen_bool(0.5) { rng.gen_range(-100..=100) } else { rng.gen() });
            Value::Int64(v)
        }
        TypeTag::Double => {
            let v = boundary(rng, &[0.0, 1.0, -1.0, f64::MIN, f64::MAX])
                .unwrap_or_else(|| rng.gen_range(-1000.0..1000.0));
            Value::Float64(v)
        }
        TypeTag::String => {
            let len = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=MAX_STRING_LEN) };
            Value::Str((0..len).map(|_| rng.gen_range(0x20u8..0x7F) as char).collect())
        }
        TypeTag::Array(elem) => {
            let len = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=MAX_ARRAY_LEN) };
            Value::array((**elem).clone(), (0..len).map(|_| random_value(elem, rng)).collect())
        }
        TypeTag::Void | TypeTag::Object(_) => panic!("random_value on unsupported type {ty}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_per_seed() {
        let sig = MethodSignature::new("f", &[("c", TypeTag::Char)], TypeTag::Char);
        let a = generate_random_inputs(&sig, 3, 7).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|t| t.len() == 1 && matches!(t[0], Value::Char(_))));
        assert_eq!(a, generate_random_inputs(&sig, 3, 7).unwrap());
        assert!(generate_random_inputs(&sig, 0, 7).unwrap().is_empty());
    }

    #[test]
    fn object_params_are_rejected() {
        let sig = MethodSignature::new("f", &[("o", TypeTag::Object("Foo".into()))], TypeTag::Int);
        assert_eq!(generate_random_inputs(&sig, 1, 0), Err(RandomError::UnsupportedType("Foo".into())));
    }

    #[test]
    fn values_conform_to_their_types() {
        let ty = TypeTag::Array(Box::new(TypeTag::Array(Box::new(TypeTag::String))));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert!(random_value(&ty, &mut rng).conforms_to(&ty));
        }
    }

    #[test]
    fn boundary_rates_are_near_one_tenth() {
        let sig = MethodSignature::new("f", &[("x", TypeTag::Int)], TypeTag::Int);
        let draws = generate_random_inputs(&sig, 10_000, 11).unwrap();
        for b in [0, 1, -1, i32::MIN, i32::MAX] {
            let hits = draws.iter().filter(|t| t[0] == Value::Int32(b)).count();
            assert!(hits >= 900, "{b} drawn {hits} times");
        }
    }
}
