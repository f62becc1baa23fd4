//! Certified sign and ordering decisions on scalar expressions.

use num_traits::{Signed, Zero};

use super::error::KernelError;
use super::eval::eval;
use super::expr::Scalar;
use super::linear::linear_form;

/// Default top of the precision ladder, in bits.
pub const DEFAULT_MAX_BITS: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertifiedOrdering {
    Less,
    Greater,
}

/// Certified sign of a nonzero expression. Doubles precision from 32 bits up
/// to `max_bits` until the enclosure excludes zero. Exactly-zero values (and
/// undecided budgets) surface as [`KernelError::PrecisionExhausted`]; the
/// answer is never guessed.
pub fn certified_sign(expr: &Scalar, max_bits: u32) -> Result<Sign, KernelError> {
    // Exact shortcut: rational linear combinations of cancelling atoms are
    // decided without any numeric ladder, and exact zeros are surfaced as
    // ties immediately.
    if let Some(r) = linear_form(expr).as_exact_rational() {
        return if r.is_zero() {
            Err(KernelError::PrecisionExhausted {
                max_bits,
                exact_tie: true,
            })
        } else if r.is_positive() {
            Ok(Sign::Positive)
        } else {
            Ok(Sign::Negative)
        };
    }
    let mut precision = 32u32.min(max_bits.max(1));
    loop {
        let enc = eval(expr, precision)?;
        if enc.definitely_positive() {
            return Ok(Sign::Positive);
        }
        if enc.definitely_negative() {
            return Ok(Sign::Negative);
        }
        if enc.is_exact() {
            // The enclosure pins the value to exactly zero.
            return Err(KernelError::PrecisionExhausted {
                max_bits,
                exact_tie: true,
            });
        }
        if precision >= max_bits {
            return Err(KernelError::PrecisionExhausted {
                max_bits,
                exact_tie: false,
            });
        }
        precision = precision.saturating_mul(2).min(max_bits);
    }
}

/// Strict certified comparison; equality is an error, never a third value.
pub fn certified_compare(
    lhs: &Scalar,
    rhs: &Scalar,
    max_bits: u32,
) -> Result<CertifiedOrdering, KernelError> {
    match certified_sign(&(lhs - rhs), max_bits)? {
        Sign::Negative => Ok(CertifiedOrdering::Less),
        Sign::Positive => Ok(CertifiedOrdering::Greater),
    }
}

/// Endpoint behavior for [`certify_in_range`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Open,
    Closed,
}

/// Certify `lo < x < hi` (with `<=` at closed ends). Returns `Ok(true)` when
/// certified inside, `Ok(false)` when certified outside; exact ties at a
/// closed end count as inside.
pub fn certify_in_range(
    x: &Scalar,
    lo: &Scalar,
    lo_bound: Bound,
    hi: &Scalar,
    hi_bound: Bound,
    max_bits: u32,
) -> Result<bool, KernelError> {
    match certified_compare(x, lo, max_bits) {
        Ok(CertifiedOrdering::Greater) => {}
        Ok(CertifiedOrdering::Less) => return Ok(false),
        Err(e) if e.is_exact_tie() => {
            if lo_bound == Bound::Open {
                return Ok(false);
            }
        }
        Err(e) => return Err(e),
    }
    match certified_compare(x, hi, max_bits) {
        Ok(CertifiedOrdering::Less) => Ok(true),
        Ok(CertifiedOrdering::Greater) => Ok(false),
        Err(e) if e.is_exact_tie() => Ok(hi_bound == Bound::Closed),
        Err(e) => Err(e),
    }
}
