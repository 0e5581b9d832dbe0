//! Exact integer kernels: vector falling factorials, lattice reductions
//! (echelon/Hermite/Smith forms) and multiplicative constraint systems.
//!
//! Everything here runs on arbitrary-precision integers. Floats never enter.

mod constraints;
mod lattice;

pub use constraints::{canonicalize, ConstraintSystem, MonomialConstraint};
pub(crate) use constraints::pow_rational;
pub use lattice::{
    hermite_normal_form, integer_kernel_basis, matrix_rank, row_echelon, saturated_span_basis,
    smith_normal_form, solve_integer_combination, Echelon, LatticeSolver, SmithForm,
};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("target vector is not in the lattice spanned by the generators")]
    NotInLattice,
    #[error("unknown rate-constant label `{0}`")]
    UnknownLabel(String),
    #[error("malformed monomial relation `{0}`")]
    MalformedRelation(String),
}

/// Scalar falling factorial `(x)_y`: `x(x-1)...(x-y+1)` for `y >= 1`, and 1 for `y <= 0`.
///
/// A negative `x` has no ordered selections, so it yields 0 whenever `y >= 1`.
pub fn falling_factorial_scalar(x: i64, y: i64) -> BigInt {
    if y <= 0 {
        return BigInt::one();
    }
    if x < y {
        // covers x < 0 as well: one of the factors hits zero or x is not a population
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..y {
        acc *= x - i;
    }
    acc
}

/// Componentwise falling factorial `(a)_y = prod_i (a_i)_{y_i}`.
pub fn falling_factorial(a: &[i64], y: &[i64]) -> Result<BigInt, AlgebraError> {
    if a.len() != y.len() {
        return Err(AlgebraError::DimensionMismatch {
            expected: a.len(),
            found: y.len(),
        });
    }
    let mut acc = BigInt::one();
    for (&x, &k) in a.iter().zip(y) {
        let f = falling_factorial_scalar(x, k);
        if f.is_zero() {
            return Ok(f);
        }
        acc *= f;
    }
    Ok(acc)
}

/// Floating-point falling factorial, used only by the simulator.
pub fn falling_factorial_f64(a: &[i64], y: &[i64]) -> f64 {
    let mut acc = 1.0;
    for (&x, &k) in a.iter().zip(y) {
        if k <= 0 {
            continue;
        }
        if x < k {
            return 0.0;
        }
        for i in 0..k {
            acc *= (x - i) as f64;
        }
    }
    acc
}

/// Vector factorial `a! = prod_i a_i!`.
pub fn vector_factorial(a: &[i64]) -> BigInt {
    a.iter()
        .map(|&x| falling_factorial_scalar(x, x))
        .fold(BigInt::one(), |acc, f| acc * f)
}

pub(crate) fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(&[5, 3], &[2, 1]).unwrap(), BigInt::from(60));
        assert_eq!(falling_factorial(&[7, 0], &[0, 0]).unwrap(), BigInt::one());
        assert_eq!(falling_factorial(&[2, 2], &[3, 0]).unwrap(), BigInt::zero());
        assert_eq!(falling_factorial(&[4], &[-2]).unwrap(), BigInt::one());
    }

    #[test]
    fn falling_factorial_dimension_mismatch() {
        assert_eq!(
            falling_factorial(&[1, 2], &[1]),
            Err(AlgebraError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn float_and_exact_agree() {
        for x in 0..8 {
            for y in -1..6 {
                let exact = falling_factorial(&[x], &[y]).unwrap();
                assert_eq!(exact, BigInt::from(falling_factorial_f64(&[x], &[y]) as i64));
            }
        }
    }

    #[test]
    fn factorial_of_vector() {
        assert_eq!(vector_factorial(&[3, 0, 4]), BigInt::from(6 * 24));
    }
}
