//! Exact and certified-interval arithmetic over symbolic scalar expressions.
//!
//! The kernel provides:
//! - [`Scalar`]: immutable expression trees over rationals, quadratic
//!   irrationals, pi, digit streams, sqrt/cos/sin/arccos/abs and field ops,
//!   with eager rational constant folding;
//! - [`Enclosure`]: certified interval results of [`eval`];
//! - [`certified_sign`] / [`certified_compare`]: precision-ladder decisions
//!   that refuse to guess at ties;
//! - [`IrrationalParam`]: rational, quadratic-irrational or digit-stream
//!   parameters with on-demand binary expansions.
//!
//! All values are immutable and all operations are pure; everything here is
//! safe to share across threads.

mod enclosure;
mod error;
mod eval;
mod expr;
mod linear;
mod param;
mod sign;

pub use enclosure::Enclosure;
pub use error::KernelError;
pub use eval::eval;
pub(crate) use expr::Expr;
pub use expr::Scalar;
pub use linear::{linear_form, LinearForm};
pub use param::{BinaryDigits, DigitGenerator, IrrationalParam};
pub use sign::{
    certified_compare, certified_sign, certify_in_range, Bound, CertifiedOrdering, Sign,
    DEFAULT_MAX_BITS,
};

use num_rational::BigRational;

/// Free-function form of the digit-expansion operation.
pub fn binary_digits(
    param: &IrrationalParam,
    n: u64,
    max_bits: u32,
) -> Result<BinaryDigits, KernelError> {
    param.binary_digits(n, max_bits)
}

/// Convenience: build a rational from machine integers.
pub fn big_rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}
