//! Irrational (and rational) parameters with on-demand binary expansions.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::enclosure::dyadic_floor;
use super::error::KernelError;
use super::eval::eval;
use super::expr::Scalar;

/// Deterministic generator for the binary digits of a value in (0, 1).
///
/// Digit `k` (1-based) is the k-th digit of the fractional binary expansion.
/// The generator must be pure: digit `k` is identical across calls. Results
/// are cached behind a mutex so generators are safe to share across threads.
pub struct DigitGenerator {
    label: String,
    asserted_irrational: bool,
    digit_fn: Box<dyn Fn(u64) -> bool + Send + Sync>,
    cache: Mutex<Vec<bool>>,
}

impl DigitGenerator {
    pub fn new(
        label: impl Into<String>,
        asserted_irrational: bool,
        digit_fn: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Arc<Self> {
        Arc::new(DigitGenerator {
            label: label.into(),
            asserted_irrational,
            digit_fn: Box::new(digit_fn),
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn asserted_irrational(&self) -> bool {
        self.asserted_irrational
    }

    /// 1-based digit lookup.
    pub fn digit(&self, k: u64) -> bool {
        assert!(k >= 1, "digit indices are 1-based");
        let mut cache = self.cache.lock().expect("digit cache poisoned");
        while (cache.len() as u64) < k {
            let next = cache.len() as u64 + 1;
            let d = (self.digit_fn)(next);
            cache.push(d);
        }
        cache[(k - 1) as usize]
    }

    /// Exact partial sum of the first `n` digits.
    pub fn partial_sum(&self, n: u64) -> BigRational {
        let mut num = BigUint::zero();
        for k in 1..=n {
            num <<= 1;
            if self.digit(k) {
                num |= BigUint::one();
            }
        }
        BigRational::new(BigInt::from(num), BigInt::one() << n as usize)
    }
}

impl fmt::Debug for DigitGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitGenerator")
            .field("label", &self.label)
            .field("asserted_irrational", &self.asserted_irrational)
            .finish()
    }
}

/// A parameter that may be rational, a quadratic irrational `p + q*sqrt(d)`,
/// or an opaque binary digit stream.
#[derive(Clone, Debug)]
pub enum IrrationalParam {
    Rational(BigRational),
    Quadratic {
        p: BigRational,
        q: BigRational,
        d: u64,
    },
    Digits(Arc<DigitGenerator>),
}

/// The first `n` binary digits of a value in (0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDigits {
    pub bits: Vec<bool>,
    /// True when the expansion terminates and the returned form is the
    /// terminating one padded with zeros.
    pub terminating: bool,
}

impl IrrationalParam {
    pub fn rational(numer: i64, denom: i64) -> IrrationalParam {
        IrrationalParam::Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn quadratic(p: BigRational, q: BigRational, d: u64) -> IrrationalParam {
        IrrationalParam::Quadratic { p, q, d }
    }

    pub fn digit_stream(gen: Arc<DigitGenerator>) -> IrrationalParam {
        IrrationalParam::Digits(gen)
    }

    /// Certified irrationality: a quadratic payload with `q != 0` and
    /// non-square `d` is irrational by construction; digit streams carry a
    /// caller-supplied assertion; rationals never qualify.
    pub fn is_certified_irrational(&self) -> bool {
        match self {
            IrrationalParam::Rational(_) => false,
            IrrationalParam::Quadratic { q, d, .. } => {
                !q.is_zero() && !is_perfect_square(*d)
            }
            IrrationalParam::Digits(g) => g.asserted_irrational(),
        }
    }

    /// The parameter's value as a symbolic scalar.
    pub fn to_scalar(&self) -> Scalar {
        match self {
            IrrationalParam::Rational(r) => Scalar::from_big_rational(r.clone()),
            IrrationalParam::Quadratic { p, q, d } => {
                Scalar::quad_irrational(p.clone(), q.clone(), *d)
            }
            IrrationalParam::Digits(g) => Scalar::digit_stream(g.clone()),
        }
    }

    /// First `n` binary digits of the fractional expansion. The value must
    /// lie in (0, 1).
    pub fn binary_digits(&self, n: u64, max_bits: u32) -> Result<BinaryDigits, KernelError> {
        match self {
            IrrationalParam::Rational(r) => rational_digits(r, n),
            IrrationalParam::Digits(g) => Ok(BinaryDigits {
                bits: (1..=n).map(|k| g.digit(k)).collect(),
                terminating: false,
            }),
            IrrationalParam::Quadratic { .. } => {
                let scalar = self.to_scalar();
                irrational_digits(&scalar, n, max_bits)
            }
        }
    }

    /// 1-based single digit lookup.
    pub fn digit(&self, k: u64, max_bits: u32) -> Result<bool, KernelError> {
        match self {
            IrrationalParam::Digits(g) => Ok(g.digit(k)),
            _ => Ok(*self
                .binary_digits(k, max_bits)?
                .bits
                .last()
                .expect("k >= 1")),
        }
    }
}

impl fmt::Display for IrrationalParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrationalParam::Rational(r) => write!(f, "{}", r),
            IrrationalParam::Quadratic { p, q, d } => {
                if p.is_zero() {
                    write!(f, "{}*sqrt({})", q, d)
                } else {
                    write!(f, "{} + {}*sqrt({})", p, q, d)
                }
            }
            IrrationalParam::Digits(g) => write!(f, "{}", g.label()),
        }
    }
}

pub(crate) fn is_perfect_square(d: u64) -> bool {
    let s = (d as f64).sqrt() as u64;
    for c in s.saturating_sub(1)..=s + 1 {
        if c * c == d {
            return true;
        }
    }
    false
}

fn rational_digits(r: &BigRational, n: u64) -> Result<BinaryDigits, KernelError> {
    if !(r > &BigRational::zero() && r < &BigRational::one()) {
        return Err(KernelError::ParameterOutOfRange(format!(
            "binary expansion requires a value in (0, 1), got {r}"
        )));
    }
    let mut bits = Vec::with_capacity(n as usize);
    let mut num = r.numer().clone();
    let den = r.denom();
    let mut terminated = false;
    for _ in 0..n {
        if num.is_zero() {
            bits.push(false);
            terminated = true;
            continue;
        }
        num <<= 1;
        if &num >= den {
            bits.push(true);
            num -= den;
        } else {
            bits.push(false);
        }
    }
    Ok(BinaryDigits {
        bits,
        terminating: terminated || num.is_zero(),
    })
}

/// Digits of a certified-irrational scalar via enclosure refinement: refine
/// until the first `n` grid cells are unambiguous. Terminates because the
/// value is never a dyadic rational.
fn irrational_digits(
    value: &Scalar,
    n: u64,
    max_bits: u32,
) -> Result<BinaryDigits, KernelError> {
    let mut precision = (n as u32).saturating_add(32);
    loop {
        let enc = eval(value, precision)?;
        if !(enc.lower() > &BigRational::zero() && enc.upper() < &BigRational::one()) {
            if precision >= max_bits {
                return Err(KernelError::ParameterOutOfRange(
                    "binary expansion requires a value in (0, 1)".into(),
                ));
            }
        } else {
            let lo_cell = dyadic_floor(enc.lower(), n as u32);
            let hi_cell = dyadic_floor(enc.upper(), n as u32);
            if lo_cell == hi_cell {
                // All n leading digits are pinned down; read them off the cell.
                let scaled = &lo_cell * BigRational::from(BigInt::one() << n as usize);
                let mut k = scaled.to_integer();
                let mut bits = vec![false; n as usize];
                for i in (0..n as usize).rev() {
                    bits[i] = k.bit(0);
                    k >>= 1;
                }
                return Ok(BinaryDigits {
                    bits,
                    terminating: false,
                });
            }
        }
        if precision >= max_bits {
            return Err(KernelError::DigitBudgetExhausted { index: n });
        }
        precision = precision.saturating_mul(2).min(max_bits);
    }
}
