//! Certified interval endpoints for real-valued scalar expressions.
//!
//! An [`Enclosure`] is a pair of arbitrary-precision rational bounds
//! guaranteed to contain the true value of the expression it was computed
//! from. Exact (rational-only) evaluations produce zero-width enclosures
//! with arbitrary rational endpoints; every inexact operation rounds its
//! endpoints outward onto a dyadic grid, so inexact enclosures always carry
//! power-of-two denominators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A certified interval `[lo, hi]` containing a real value, tagged with the
/// precision (in bits) it was requested at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
}

impl Enclosure {
    /// Exact zero-width enclosure of a rational value.
    pub fn exact(value: BigRational, precision_bits: u32) -> Self {
        Enclosure {
            lo: value.clone(),
            hi: value,
            precision_bits,
        }
    }

    pub(crate) fn new(lo: BigRational, hi: BigRational, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi, "enclosure bounds out of order");
        Enclosure {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn lower(&self) -> &BigRational {
        &self.lo
    }

    pub fn upper(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// True when the enclosure pins the value down exactly.
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// True when `other` lies entirely within `self`.
    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn definitely_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn definitely_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Largest `m >= 0` with `m <= |v|` for every `v` in the interval.
    pub fn magnitude_lower_bound(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            -self.hi.clone()
        }
    }

    /// Smallest `m` with `|v| <= m` for every `v` in the interval.
    pub fn magnitude_upper_bound(&self) -> BigRational {
        let la = self.lo.abs();
        let ha = self.hi.abs();
        if la > ha {
            la
        } else {
            ha
        }
    }

    pub(crate) fn with_precision(mut self, precision_bits: u32) -> Self {
        self.precision_bits = precision_bits;
        self
    }

    /// Intersection of two enclosures of the same value. Both must contain
    /// the value, so the intersection is nonempty for honest inputs.
    pub(crate) fn intersect(&self, other: &Enclosure) -> Enclosure {
        let lo = if self.lo >= other.lo {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi <= other.hi {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        debug_assert!(lo <= hi, "disjoint enclosures for the same value");
        Enclosure::new(lo, hi, self.precision_bits.max(other.precision_bits))
    }

    // ---- interval arithmetic (exact rational endpoints) ----

    pub(crate) fn add(&self, rhs: &Enclosure, work: u32) -> Enclosure {
        Enclosure::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi, work).round_out(work)
    }

    pub(crate) fn sub(&self, rhs: &Enclosure, work: u32) -> Enclosure {
        Enclosure::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo, work).round_out(work)
    }

    pub(crate) fn neg(&self) -> Enclosure {
        Enclosure::new(-self.hi.clone(), -self.lo.clone(), self.precision_bits)
    }

    pub(crate) fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = self.magnitude_upper_bound();
            Enclosure::new(BigRational::zero(), m, self.precision_bits)
        }
    }

    pub(crate) fn mul(&self, rhs: &Enclosure, work: u32) -> Enclosure {
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Enclosure::new(lo, hi, work).round_out(work)
    }

    /// Multiply by an exact integer.
    pub(crate) fn mul_int(&self, k: &BigInt) -> Enclosure {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Enclosure::new(a, b, self.precision_bits)
        } else {
            Enclosure::new(b, a, self.precision_bits)
        }
    }

    /// Division; `None` when the denominator interval contains zero.
    pub(crate) fn div(&self, rhs: &Enclosure, work: u32) -> Option<Enclosure> {
        if rhs.contains_zero() {
            return None;
        }
        let cands = [
            &self.lo / &rhs.lo,
            &self.lo / &rhs.hi,
            &self.hi / &rhs.lo,
            &self.hi / &rhs.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Some(Enclosure::new(lo, hi, work).round_out(work))
    }

    /// Integer power by repeated squaring. Negative exponents go through
    /// `div`, so they fail (return `None`) when the base contains zero.
    pub(crate) fn powi(&self, exp: i64, work: u32) -> Option<Enclosure> {
        if exp == 0 {
            return Some(Enclosure::exact(BigRational::one(), work));
        }
        if exp < 0 {
            let positive = self.powi(-exp, work)?;
            return Enclosure::exact(BigRational::one(), work).div(&positive, work);
        }
        let mut result: Option<Enclosure> = None;
        let mut base = self.clone();
        let mut e = exp as u64;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base, work),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.square(work);
        }
        Some(result.expect("exp > 0"))
    }

    /// Squaring tightens the lower bound to zero when the interval straddles
    /// the origin, unlike naive self-multiplication.
    pub(crate) fn square(&self, work: u32) -> Enclosure {
        let a = self.magnitude_lower_bound();
        let b = self.magnitude_upper_bound();
        Enclosure::new(&a * &a, &b * &b, work).round_out(work)
    }

    /// Round endpoints outward onto the dyadic grid with `bits` fractional
    /// bits. Exact enclosures are left untouched so rational results stay
    /// exact at any precision.
    pub(crate) fn round_out(self, bits: u32) -> Enclosure {
        if self.is_exact() {
            return self;
        }
        let lo = dyadic_floor(&self.lo, bits);
        let hi = dyadic_ceil(&self.hi, bits);
        Enclosure::new(lo, hi, self.precision_bits)
    }
}

/// Largest dyadic `k / 2^bits <= value`.
pub(crate) fn dyadic_floor(value: &BigRational, bits: u32) -> BigRational {
    let scaled_num = value.numer() << bits;
    let k = scaled_num.div_floor(value.denom());
    BigRational::new(k, BigInt::one() << bits)
}

/// Smallest dyadic `k / 2^bits >= value`.
pub(crate) fn dyadic_ceil(value: &BigRational, bits: u32) -> BigRational {
    let scaled_num = value.numer() << bits;
    let k = scaled_num.div_ceil(value.denom());
    BigRational::new(k, BigInt::one() << bits)
}

/// `2^-bits` as a rational, the grid step of the dyadic rounding.
pub(crate) fn two_pow_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dyadic_rounding_brackets_value() {
        let v = rat(1, 3);
        let lo = dyadic_floor(&v, 8);
        let hi = dyadic_ceil(&v, 8);
        assert!(lo < v && v < hi);
        assert_eq!(&hi - &lo, two_pow_neg(8));
    }

    #[test]
    fn rounding_keeps_exact_enclosures_exact() {
        let e = Enclosure::exact(rat(1, 3), 64).round_out(16);
        assert!(e.is_exact());
        assert_eq!(e.lower(), &rat(1, 3));
    }

    #[test]
    fn square_of_straddling_interval_starts_at_zero() {
        let e = Enclosure::new(rat(-1, 2), rat(1, 4), 32);
        let sq = e.square(32);
        assert!(!sq.lower().is_negative());
        assert!(sq.contains(&rat(1, 16)));
        assert!(sq.contains(&rat(0, 1)));
    }

    #[test]
    fn division_by_straddling_interval_fails() {
        let num = Enclosure::exact(rat(1, 1), 32);
        let den = Enclosure::new(rat(-1, 8), rat(1, 8), 32);
        assert!(num.div(&den, 32).is_none());
    }

    #[test]
    fn negative_power_of_positive_interval() {
        let e = Enclosure::new(rat(1, 2), rat(3, 4), 32);
        let inv = e.powi(-2, 64).unwrap();
        assert!(inv.contains(&rat(16, 9)));
        assert!(inv.contains(&rat(4, 1)));
    }
}
