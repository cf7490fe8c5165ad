//! Exact arithmetic in cyclotomic fields.
//!
//! [`ExactScalar`] holds every value the representation formulas produce:
//! roots of unity, square roots of positive rationals, and their sums and
//! products. Orders grow lazily to the lcm of the operands.

mod numeric;
mod scalar;
mod tables;

pub use numeric::{to_decimal, to_decimal_directed, ComplexInterval};
pub use scalar::{ExactScalar, Rational};
pub use tables::{cyclotomic_poly, totient};


use num_bigint::BigInt;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
