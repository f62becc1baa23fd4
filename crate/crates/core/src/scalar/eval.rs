//! Certified enclosure evaluation.
//!
//! `eval` walks the expression DAG with exact rational interval arithmetic,
//! rounding inexact endpoints outward onto dyadic grids. Transcendental
//! leaves (pi, sqrt, cos, sin, arccos) are bracketed from scratch with
//! explicit tail bounds, never through floating point.
//!
//! Precision contract: evaluation at `p2 > p1` bits always returns an
//! enclosure nested inside the `p1`-bit one. This is structural: results are
//! intersections of raw evaluations along the power-of-two rung chain
//! `32, 64, ..., next_power_of_two(p)`, and a longer chain only intersects
//! further.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::enclosure::{two_pow_neg, Enclosure};
use super::error::KernelError;
use super::expr::{exact_rational_sqrt, Expr, Scalar};

/// Evaluate `expr` to a certified enclosure of width at most
/// `2^(1 - precision_bits) * max(1, |value|)`. Rational-only expressions
/// evaluate exactly (zero width) at any precision.
pub fn eval(expr: &Scalar, precision_bits: u32) -> Result<Enclosure, KernelError> {
    assert!(precision_bits >= 1, "precision must be positive");
    if let Some(r) = expr.as_rational() {
        return Ok(Enclosure::exact(r.clone(), precision_bits));
    }
    let top = rung_for(precision_bits);
    let mut rung = 32u32;
    let mut acc: Option<Enclosure> = None;
    loop {
        match raw_eval(expr, rung) {
            Ok(raw) => {
                acc = Some(match acc {
                    None => raw,
                    Some(prev) => prev.intersect(&raw),
                });
            }
            Err(err) => {
                // Lower rungs may fail on expressions that need more bits
                // (for example a very small denominator); only the top rung
                // is authoritative.
                if rung >= top {
                    return Err(err);
                }
            }
        }
        if rung >= top {
            break;
        }
        rung = rung.saturating_mul(2);
    }
    Ok(acc.expect("top rung evaluated").with_precision(precision_bits))
}

fn rung_for(p: u32) -> u32 {
    p.max(32).next_power_of_two()
}

/// How a tree evaluation can fail at a fixed working precision.
enum TreeError {
    /// No amount of refinement will help (exact division by zero, argument
    /// certifiably outside a domain).
    Hard(KernelError),
    /// Refinement at higher working precision may resolve this.
    Soft(KernelError),
}

use TreeError::{Hard, Soft};

type TreeResult = Result<Enclosure, TreeError>;
type Memo = HashMap<*const Expr, Enclosure>;

/// Evaluate at one rung: escalate the internal working precision until the
/// result width meets the rung's target.
fn raw_eval(expr: &Scalar, rung: u32) -> Result<Enclosure, KernelError> {
    let cap = rung.saturating_mul(16).saturating_add(4096);
    let mut work = rung + 16;
    loop {
        let mut memo: Memo = HashMap::new();
        match eval_tree(expr, work, &mut memo) {
            Ok(enc) => {
                if width_target_met(&enc, rung) {
                    return Ok(enc.with_precision(rung));
                }
                if work >= cap {
                    return Err(KernelError::PrecisionExhausted {
                        max_bits: cap,
                        exact_tie: false,
                    });
                }
            }
            Err(Hard(e)) => return Err(e),
            Err(Soft(e)) => {
                if work >= cap {
                    return Err(e);
                }
            }
        }
        work = work.saturating_mul(2).min(cap);
    }
}

/// Width target: `2^(1-rung) * max(1, certified magnitude lower bound)`.
fn width_target_met(enc: &Enclosure, rung: u32) -> bool {
    let mut scale = enc.magnitude_lower_bound();
    if scale < BigRational::one() {
        scale = BigRational::one();
    }
    enc.width() <= two_pow_neg(rung - 1) * scale
}

fn eval_tree(expr: &Scalar, work: u32, memo: &mut Memo) -> TreeResult {
    let key: *const Expr = &*expr.0;
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    let result = match &*expr.0 {
        Expr::Rational(r) => Enclosure::exact(r.clone(), work),
        Expr::Pi => pi_enclosure(work),
        Expr::Digits(gen) => {
            let n = work as u64 + 2;
            let lo = gen.partial_sum(n);
            let hi = &lo + two_pow_neg(n as u32);
            Enclosure::new(lo, hi, work)
        }
        Expr::Sqrt(inner) => sqrt_interval(&eval_tree(inner, work, memo)?, work)?,
        Expr::Cos(inner) => cos_interval(&eval_tree(inner, work, memo)?, work),
        Expr::Sin(inner) => {
            let half_pi = pi_enclosure(work + 32).mul(&half(), work + 32);
            let shifted = eval_tree(inner, work, memo)?.sub(&half_pi, work + 32);
            cos_interval(&shifted, work)
        }
        Expr::ArcCos(inner) => arccos_interval(&eval_tree(inner, work, memo)?, work)?,
        Expr::Abs(inner) => eval_tree(inner, work, memo)?.abs(),
        Expr::Add(a, b) => {
            let (ea, eb) = (eval_tree(a, work, memo)?, eval_tree(b, work, memo)?);
            ea.add(&eb, work)
        }
        Expr::Sub(a, b) => {
            let (ea, eb) = (eval_tree(a, work, memo)?, eval_tree(b, work, memo)?);
            ea.sub(&eb, work)
        }
        Expr::Mul(a, b) => {
            let (ea, eb) = (eval_tree(a, work, memo)?, eval_tree(b, work, memo)?);
            ea.mul(&eb, work)
        }
        Expr::Div(a, b) => {
            let ea = eval_tree(a, work, memo)?;
            let eb = eval_tree(b, work, memo)?;
            if eb.is_exact() && eb.lower().is_zero() {
                return Err(Hard(KernelError::DivisionByZero(
                    "denominator is exactly zero".into(),
                )));
            }
            match ea.div(&eb, work) {
                Some(q) => q,
                None => {
                    return Err(Soft(KernelError::DivisionByZero(
                        "denominator enclosure contains zero".into(),
                    )))
                }
            }
        }
        Expr::Pow(base, k) => {
            let eb = eval_tree(base, work, memo)?;
            if *k < 0 && eb.is_exact() && eb.lower().is_zero() {
                return Err(Hard(KernelError::DivisionByZero(
                    "zero base raised to a negative power".into(),
                )));
            }
            match eb.powi(*k, work) {
                Some(p) => p,
                None => {
                    return Err(Soft(KernelError::DivisionByZero(
                        "base enclosure contains zero for a negative power".into(),
                    )))
                }
            }
        }
    };
    memo.insert(key, result.clone());
    Ok(result)
}

fn half() -> Enclosure {
    Enclosure::exact(BigRational::new(BigInt::one(), BigInt::from(2)), 32)
}

// ---- pi ----

static PI_CACHE: OnceLock<Mutex<HashMap<u32, Enclosure>>> = OnceLock::new();

/// Machin's formula with exact dyadic term brackets; cached per quantized
/// working precision.
pub(crate) fn pi_enclosure(work: u32) -> Enclosure {
    let key = work.max(32).next_power_of_two();
    let cache = PI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("pi cache poisoned").get(&key) {
        return hit.clone().with_precision(work);
    }
    let a5 = atan_reciprocal(5, key + 16);
    let a239 = atan_reciprocal(239, key + 16);
    let pi = a5
        .mul_int(&BigInt::from(16))
        .sub(&a239.mul_int(&BigInt::from(4)), key);
    cache
        .lock()
        .expect("pi cache poisoned")
        .insert(key, pi.clone());
    pi.with_precision(work)
}

/// Bracket of `atan(1/n)` for integer `n >= 5` via the alternating Taylor
/// series, accumulated in fixed-point with outward rounding per term.
fn atan_reciprocal(n: u64, work: u32) -> Enclosure {
    let scale = work + 16;
    let one_scaled = BigInt::one() << scale;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let n_big = BigInt::from(n);
    let n_sq = &n_big * &n_big;
    let mut denom_pow = n_big;
    let mut k = 0u64;
    loop {
        let d = &denom_pow * BigInt::from(2 * k + 1);
        let t_lo = one_scaled.div_floor(&d);
        let t_hi = one_scaled.div_ceil(&d);
        if k % 2 == 0 {
            lo += &t_lo;
            hi += &t_hi;
        } else {
            lo -= &t_hi;
            hi -= &t_lo;
        }
        if t_hi <= BigInt::one() {
            // Alternating remainder is bounded by the first omitted term,
            // itself below one grid cell; widen by two cells.
            let slack = BigInt::from(2);
            lo -= &slack;
            hi += &slack;
            break;
        }
        denom_pow *= &n_sq;
        k += 1;
    }
    let den = BigInt::one() << scale;
    Enclosure::new(
        BigRational::new(lo, den.clone()),
        BigRational::new(hi, den),
        work,
    )
}

// ---- sqrt ----

fn sqrt_interval(arg: &Enclosure, work: u32) -> TreeResult {
    if arg.upper().is_negative() {
        return Err(Hard(KernelError::DomainError(
            "square root of a certifiably negative value".into(),
        )));
    }
    if arg.lower().is_negative() {
        return Err(Soft(KernelError::DomainError(
            "square root argument enclosure dips below zero".into(),
        )));
    }
    if arg.is_exact() {
        if let Some(root) = exact_rational_sqrt(arg.lower()) {
            return Ok(Enclosure::exact(root, work));
        }
    }
    let lo = rational_sqrt_bracket(arg.lower(), work).0;
    let hi = rational_sqrt_bracket(arg.upper(), work).1;
    Ok(Enclosure::new(lo, hi, work).round_out(work))
}

/// `(down, up)` rational bracket of `sqrt(r)` for `r >= 0`, via the integer
/// square root of `numer * denom * 4^m`.
fn rational_sqrt_bracket(r: &BigRational, work: u32) -> (BigRational, BigRational) {
    if r.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let m = (work + 8) as usize;
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let scaled = (n * d) << (2 * m);
    let isq = BigInt::from(scaled.sqrt());
    let denom = BigInt::from(d.clone()) << m;
    (
        BigRational::new(isq.clone(), denom.clone()),
        BigRational::new(isq + BigInt::one(), denom),
    )
}

// ---- cosine (and sine via shift) ----

/// Enclosure of `cos` over an interval. Falls back to `[-1, 1]` (always
/// valid) whenever the argument is too wide or the reduction is uncertain;
/// the outer refinement loop then retries with more bits.
fn cos_interval(arg: &Enclosure, work: u32) -> Enclosure {
    let full = Enclosure::new(-BigRational::one(), BigRational::one(), work);
    if arg.width() >= BigRational::from(BigInt::from(6)) {
        return full;
    }
    let pi = pi_enclosure(work + 32);
    // Nearest integer multiple of pi to the midpoint.
    let mid = (arg.lower() + arg.upper()) / BigRational::from(BigInt::from(2));
    let k = round_to_integer(&(mid / pi.lower()));
    let reduced = arg.sub(&pi.mul_int(&k), work + 32);
    let ja = reduced.abs();
    if ja.upper() > &BigRational::from(BigInt::from(4)) {
        return full;
    }
    // |reduced| lies in [a, b] within [0, 4]; cos decreases on [0, pi] and
    // has its only interior minimum at pi.
    let a = ja.lower().clone();
    let b = ja.upper().clone();
    let upper = if a.is_zero() {
        BigRational::one()
    } else {
        let ca = cos_point_bracket(&a, work).1;
        let cb = cos_point_bracket(&b, work).1;
        if ca > cb {
            ca
        } else {
            cb
        }
    };
    let lower = if &b > pi.lower() {
        -BigRational::one()
    } else {
        cos_point_bracket(&b, work).0
    };
    let mut result = Enclosure::new(lower, upper, work);
    if k.is_odd() {
        result = result.neg();
    }
    clamp_unit(result, work).round_out(work)
}

fn clamp_unit(e: Enclosure, work: u32) -> Enclosure {
    let one = BigRational::one();
    let lo = if e.lower() < &-one.clone() {
        -one.clone()
    } else {
        e.lower().clone()
    };
    let hi = if e.upper() > &one { one } else { e.upper().clone() };
    Enclosure::new(lo, hi, work)
}

fn round_to_integer(q: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let shifted = q + BigRational::new(BigInt::one(), two);
    shifted.floor().to_integer()
}

/// Taylor bracket of `cos(r)` for rational `r` in `[0, 4]`.
fn cos_point_bracket(r: &BigRational, work: u32) -> (BigRational, BigRational) {
    let scale = work + 16;
    let x2 = Enclosure::exact(r * r, scale);
    let mut term = Enclosure::exact(BigRational::one(), scale);
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        let divisor = BigRational::from(BigInt::from((2 * k - 1) * (2 * k)));
        term = term
            .mul(&x2, scale)
            .mul(&Enclosure::exact(BigRational::one() / divisor, scale), scale);
        if k % 2 == 1 {
            sum = sum.sub(&term, scale);
        } else {
            sum = sum.add(&term, scale);
        }
        // Once the term ratio drops below 1/2 the tail is bounded by twice
        // the next term.
        let next_ratio_den = BigRational::from(BigInt::from((2 * k + 1) * (2 * k + 2)));
        let ratio_small = x2.upper() * BigRational::from(BigInt::from(2)) <= next_ratio_den;
        let bound = term.magnitude_upper_bound();
        if ratio_small && bound <= two_pow_neg(scale.saturating_sub(2)) {
            let slack = bound * BigRational::from(BigInt::from(2)) + two_pow_neg(scale);
            let widened = Enclosure::new(sum.lower() - &slack, sum.upper() + &slack, work);
            return (widened.lower().clone(), widened.upper().clone());
        }
        k += 1;
    }
}

// ---- arccos ----

fn arccos_interval(arg: &Enclosure, work: u32) -> TreeResult {
    let one = BigRational::one();
    if arg.lower() > &one || arg.upper() < &-one.clone() {
        return Err(Hard(KernelError::DomainError(
            "arccos argument certifiably outside [-1, 1]".into(),
        )));
    }
    if arg.lower() < &-one.clone() || arg.upper() > &one {
        return Err(Soft(KernelError::DomainError(
            "arccos argument enclosure escapes [-1, 1]".into(),
        )));
    }
    // arccos is monotone decreasing on [-1, 1].
    let lo = acos_point_bracket(arg.upper(), work).0;
    let hi = acos_point_bracket(arg.lower(), work).1;
    Ok(Enclosure::new(lo, hi, work).round_out(work))
}

/// `(down, up)` bracket of `arccos(y)` for rational `y` in `[-1, 1]`.
fn acos_point_bracket(y: &BigRational, work: u32) -> (BigRational, BigRational) {
    let one = BigRational::one();
    if y == &one {
        return (BigRational::zero(), BigRational::zero());
    }
    if y == &-one.clone() {
        let pi = pi_enclosure(work);
        return (pi.lower().clone(), pi.upper().clone());
    }
    if y.is_negative() {
        let (d, u) = acos_point_bracket(&-y.clone(), work);
        let pi = pi_enclosure(work + 8);
        return (pi.lower() - &u, pi.upper() - &d);
    }
    // arccos(y) = 2 atan(sqrt((1-y)/(1+y))) for y in [0, 1).
    let scale = work + 16;
    let u2 = (&one - y) / (&one + y);
    let (ulo, uhi) = rational_sqrt_bracket(&u2, scale);
    let mut u = Enclosure::new(ulo, uhi, scale).round_out(scale);
    // Halve the argument until it is at most 1/4.
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut halvings = 0u32;
    while u.upper() > &quarter {
        let one_plus_u2 = Enclosure::exact(one.clone(), scale).add(&u.square(scale), scale);
        let s = match sqrt_interval(&one_plus_u2, scale) {
            Ok(s) => s,
            Err(_) => unreachable!("1 + u^2 is certifiably positive"),
        };
        let denom = Enclosure::exact(one.clone(), scale).add(&s, scale);
        u = u
            .div(&denom, scale)
            .expect("1 + sqrt(1 + u^2) is positive");
        halvings += 1;
    }
    let atan = atan_taylor(&u, scale);
    let factor = BigInt::one() << (halvings + 1);
    let doubled = atan.mul_int(&factor);
    (doubled.lower().clone(), doubled.upper().clone())
}

/// Alternating Taylor bracket of `atan(u)` for an interval `u` within
/// `[0, 1/4]`.
fn atan_taylor(u: &Enclosure, scale: u32) -> Enclosure {
    let u2 = u.square(scale);
    let mut power = u.clone();
    let mut sum = u.clone();
    let mut k: u64 = 1;
    loop {
        power = power.mul(&u2, scale);
        let divisor = BigRational::from(BigInt::from(2 * k + 1));
        let term = power.mul(
            &Enclosure::exact(BigRational::one() / divisor, scale),
            scale,
        );
        if k % 2 == 1 {
            sum = sum.sub(&term, scale);
        } else {
            sum = sum.add(&term, scale);
        }
        let bound = term.magnitude_upper_bound();
        if bound <= two_pow_neg(scale.saturating_sub(2)) {
            // Terms shrink by at least u^2 <= 1/16 per step; the tail is
            // bounded by the last included term.
            let slack = bound + two_pow_neg(scale);
            return Enclosure::new(sum.lower() - &slack, sum.upper() + &slack, scale);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn approx(s: &str) -> BigRational {
        // parse a decimal literal into an exact rational
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        let denom = BigInt::from(10).pow(frac_part.len() as u32);
        let num: BigInt = format!("{int_part}{frac_part}")
            .replace('-', "")
            .parse()
            .unwrap();
        let v = BigRational::new(num, denom);
        if s.starts_with('-') {
            -v
        } else {
            v
        }
    }

    /// The enclosure must come within one unit in the last decimal place of
    /// the reference value (truncated decimals are coarser than tight
    /// enclosures, so exact containment is too strict a check).
    fn assert_near(enc: &Enclosure, decimal: &str) {
        let v = approx(decimal);
        let frac_digits = decimal.split_once('.').map_or(0, |(_, f)| f.len());
        let tol = BigRational::new(BigInt::from(2), BigInt::from(10).pow(frac_digits as u32));
        assert!(
            enc.lower() <= &(&v + &tol) && &(&v - &tol) <= enc.upper(),
            "enclosure [{}, {}] not near {}",
            enc.lower(),
            enc.upper(),
            decimal
        );
    }

    #[test]
    fn pi_enclosure_is_tight_and_correct() {
        let e = pi_enclosure(128);
        assert_near(&e, "3.14159265358979323846264338327950288");
        assert!(e.width() <= two_pow_neg(120));
    }

    #[test]
    fn rational_expression_is_exact() {
        let e = &Scalar::rational(1, 2) + &Scalar::rational(1, 3);
        let enc = eval(&e, 7).unwrap();
        assert!(enc.is_exact());
        assert_eq!(enc.lower(), &rat(5, 6));
    }

    #[test]
    fn sqrt_two_bracket() {
        let enc = eval(&Scalar::integer(2).sqrt(), 128).unwrap();
        assert_near(&enc, "1.41421356237309504880168872420969807857");
        assert!(enc.width() <= two_pow_neg(120));
    }

    #[test]
    fn arccos_of_minus_sqrt_half_is_three_quarter_pi() {
        // arccos(-sqrt(1/2)) = 3*pi/4
        let arg = -&Scalar::rational(1, 2).sqrt();
        let enc = eval(&arg.arccos(), 64).unwrap();
        assert_near(&enc, "2.35619449019234492884698253745962716");
        assert!(enc.width() <= two_pow_neg(60));
    }

    #[test]
    fn arccos_derived_value() {
        // independently computed to 100 digits beforehand
        let arg = &(-&Scalar::one()) / &Scalar::integer(10).sqrt();
        let enc = eval(&arg.arccos(), 64).unwrap();
        assert_near(&enc, "1.89254688119153881263272630599841276");
    }

    #[test]
    fn cos_of_three_quarter_pi_is_negative_sqrt_half() {
        let x = &(&Scalar::pi() * &Scalar::rational(3, 4)).cos();
        let enc = eval(x, 96).unwrap();
        assert_near(&enc, "-0.70710678118654752440084436210484903928");
        assert!(enc.definitely_negative());
    }

    #[test]
    fn sin_of_pi_sixth() {
        let x = (&Scalar::pi() * &Scalar::rational(1, 6)).sin();
        let enc = eval(&x, 96).unwrap();
        assert!(enc.contains(&rat(1, 2)));
        assert!(enc.width() <= two_pow_neg(90));
    }

    #[test]
    fn nesting_under_doubled_precision() {
        let exprs = [
            Scalar::pi(),
            Scalar::integer(3).sqrt(),
            (&Scalar::pi() * &Scalar::rational(5, 7)).cos(),
            &(-&Scalar::rational(1, 3).sqrt()).arccos() + &Scalar::pi(),
        ];
        for e in &exprs {
            for p in [32u32, 48, 64, 100, 128] {
                let coarse = eval(e, p).unwrap();
                let fine = eval(e, 2 * p).unwrap();
                assert!(
                    coarse.contains_enclosure(&fine),
                    "nesting violated for {e} at {p} bits"
                );
            }
        }
    }

    #[test]
    fn division_by_symbolic_zero_fails_explicitly() {
        // pi - pi built from distinct nodes stays symbolic and encloses 0,
        // so dividing by it must fail rather than guess.
        let z = &Scalar::pi() - &Scalar::pi();
        let e = &Scalar::one() / &z;
        assert!(matches!(
            eval(&e, 64),
            Err(KernelError::DivisionByZero(_))
        ));
    }

    #[test]
    fn arccos_outside_domain_fails() {
        let e = Scalar::rational(3, 2).arccos();
        assert!(matches!(eval(&e, 64), Err(KernelError::DomainError(_))));
    }

    #[test]
    fn large_argument_cosine_reduction() {
        // cos(1000) needs ~10 extra bits for the argument reduction.
        let x = Scalar::integer(1000).cos();
        let enc = eval(&x, 64).unwrap();
        assert_near(&enc, "0.56237907629070299107824922660539596875");
    }

    #[test]
    fn digit_stream_leaf_brackets_value() {
        use super::super::param::DigitGenerator;
        // 1/3 = 0.010101...
        let gen = DigitGenerator::new("one-third", false, |k| k % 2 == 0);
        let s = Scalar::digit_stream(gen);
        let enc = eval(&s, 64).unwrap();
        assert!(enc.contains(&rat(1, 3)));
        assert!(enc.width() <= two_pow_neg(60));
    }
}
