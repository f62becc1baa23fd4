//! Symbolic scalar expressions.
//!
//! A [`Scalar`] is a reference-counted expression tree over rationals, the
//! constant pi, deterministic binary digit streams, square roots, (arc)cosine,
//! sine, absolute value and field operations. Construction eagerly folds
//! rational-only operations so that purely rational computations collapse to
//! a single rational leaf; nothing else is simplified.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::param::DigitGenerator;

#[derive(Debug)]
pub(crate) enum Expr {
    Rational(BigRational),
    Pi,
    /// Value in (0, 1) defined by a deterministic binary digit stream.
    Digits(Arc<DigitGenerator>),
    Sqrt(Scalar),
    Cos(Scalar),
    Sin(Scalar),
    ArcCos(Scalar),
    Abs(Scalar),
    Add(Scalar, Scalar),
    Sub(Scalar, Scalar),
    Mul(Scalar, Scalar),
    Div(Scalar, Scalar),
    Pow(Scalar, i64),
}

/// A shared, immutable scalar expression.
#[derive(Clone, Debug)]
pub struct Scalar(pub(crate) Arc<Expr>);

impl Scalar {
    fn wrap(e: Expr) -> Scalar {
        Scalar(Arc::new(e))
    }

    // ---- leaves ----

    pub fn from_big_rational(r: BigRational) -> Scalar {
        Scalar::wrap(Expr::Rational(r))
    }

    pub fn rational(numer: i64, denom: i64) -> Scalar {
        assert!(denom != 0, "rational literal with zero denominator");
        Scalar::from_big_rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> Scalar {
        Scalar::from_big_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn zero() -> Scalar {
        Scalar::integer(0)
    }

    pub fn one() -> Scalar {
        Scalar::integer(1)
    }

    pub fn pi() -> Scalar {
        Scalar::wrap(Expr::Pi)
    }

    pub(crate) fn digit_stream(gen: Arc<DigitGenerator>) -> Scalar {
        Scalar::wrap(Expr::Digits(gen))
    }

    /// The quadratic irrational `p + q * sqrt(d)`.
    pub fn quad_irrational(p: BigRational, q: BigRational, d: u64) -> Scalar {
        let root = Scalar::from_big_rational(BigRational::from(BigInt::from(d))).sqrt();
        &Scalar::from_big_rational(p) + &(&Scalar::from_big_rational(q) * &root)
    }

    // ---- inspection ----

    pub fn is_rational(&self) -> bool {
        matches!(&*self.0, Expr::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &*self.0 {
            Expr::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub(crate) fn ptr_eq(&self, other: &Scalar) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Structural equality with a node budget. Returns `false` once the
    /// budget is exhausted, so callers treat very large distinct-looking
    /// trees as unequal rather than comparing them exhaustively.
    pub fn structurally_equal(&self, other: &Scalar) -> bool {
        let mut budget = 100_000usize;
        structural_eq(self, other, &mut budget)
    }

    // ---- operations (rational-only operands fold eagerly) ----

    pub fn sqrt(&self) -> Scalar {
        if let Some(r) = self.as_rational() {
            if !r.is_negative() {
                if let Some(root) = exact_rational_sqrt(r) {
                    return Scalar::from_big_rational(root);
                }
            }
        }
        Scalar::wrap(Expr::Sqrt(self.clone()))
    }

    pub fn cos(&self) -> Scalar {
        Scalar::wrap(Expr::Cos(self.clone()))
    }

    pub fn sin(&self) -> Scalar {
        Scalar::wrap(Expr::Sin(self.clone()))
    }

    pub fn arccos(&self) -> Scalar {
        Scalar::wrap(Expr::ArcCos(self.clone()))
    }

    pub fn abs(&self) -> Scalar {
        if let Some(r) = self.as_rational() {
            return Scalar::from_big_rational(r.abs());
        }
        Scalar::wrap(Expr::Abs(self.clone()))
    }

    pub fn powi(&self, exp: i64) -> Scalar {
        if let Some(r) = self.as_rational() {
            if exp >= 0 {
                return Scalar::from_big_rational(rational_pow(r, exp as u64));
            }
            if !r.is_zero() {
                let inv = BigRational::one() / r;
                return Scalar::from_big_rational(rational_pow(&inv, (-exp) as u64));
            }
            // 0^negative stays symbolic and fails at evaluation time.
        }
        if exp >= 0 && exp % 2 == 0 {
            // (0 - y)^even folds to y^even, and sqrt(r)^even folds back to a
            // rational power of the radicand.
            if let Expr::Sub(z, inner) = &*self.0 {
                if z.as_rational().map(Zero::is_zero) == Some(true) {
                    return inner.powi(exp);
                }
            }
            if let Expr::Sqrt(inner) = &*self.0 {
                if let Some(r) = inner.as_rational() {
                    if !r.is_negative() {
                        return Scalar::from_big_rational(rational_pow(r, exp as u64 / 2));
                    }
                }
            }
        }
        Scalar::wrap(Expr::Pow(self.clone(), exp))
    }

    pub fn square(&self) -> Scalar {
        self.powi(2)
    }

    pub fn recip(&self) -> Scalar {
        &Scalar::one() / self
    }
}

fn fold2(
    a: &Scalar,
    b: &Scalar,
    fold: impl Fn(&BigRational, &BigRational) -> Option<BigRational>,
    build: impl Fn(Scalar, Scalar) -> Expr,
) -> Scalar {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        if let Some(r) = fold(x, y) {
            return Scalar::from_big_rational(r);
        }
    }
    Scalar(Arc::new(build(a.clone(), b.clone())))
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        fold2(self, rhs, |x, y| Some(x + y), Expr::Add)
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        fold2(self, rhs, |x, y| Some(x - y), Expr::Sub)
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // (+-sqrt(r)) * (+-sqrt(r)) over an identical nonnegative rational
        // radicand folds to +-r; this keeps quadratic-irrational arithmetic
        // decidable.
        if let (Some((x, nx)), Some((y, ny))) = (as_signed_sqrt(self), as_signed_sqrt(rhs)) {
            if x == y && !x.is_negative() {
                let prod = x.clone();
                return Scalar::from_big_rational(if nx != ny { -prod } else { prod });
            }
        }
        fold2(self, rhs, |x, y| Some(x * y), Expr::Mul)
    }
}

/// Matches `sqrt(r)` or `0 - sqrt(r)` over a rational radicand, returning
/// the radicand and whether the value is negated.
fn as_signed_sqrt(s: &Scalar) -> Option<(&BigRational, bool)> {
    match &*s.0 {
        Expr::Sqrt(inner) => inner.as_rational().map(|r| (r, false)),
        Expr::Sub(z, inner) => {
            if z.as_rational().map(Zero::is_zero) == Some(true) {
                if let Expr::Sqrt(rad) = &*inner.0 {
                    return rad.as_rational().map(|r| (r, true));
                }
            }
            None
        }
        _ => None,
    }
}

impl std::ops::Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        fold2(
            self,
            rhs,
            |x, y| if y.is_zero() { None } else { Some(x / y) },
            Expr::Div,
        )
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        &Scalar::zero() - self
    }
}

fn rational_pow(base: &BigRational, exp: u64) -> BigRational {
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Exact square root of a nonnegative rational, when it is itself rational.
pub(crate) fn exact_rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(
            BigInt::from(sn),
            BigInt::from(sd),
        ))
    } else {
        None
    }
}

fn structural_eq(a: &Scalar, b: &Scalar, budget: &mut usize) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    match (&*a.0, &*b.0) {
        (Expr::Rational(x), Expr::Rational(y)) => x == y,
        (Expr::Pi, Expr::Pi) => true,
        (Expr::Digits(x), Expr::Digits(y)) => Arc::ptr_eq(x, y),
        (Expr::Sqrt(x), Expr::Sqrt(y))
        | (Expr::Cos(x), Expr::Cos(y))
        | (Expr::Sin(x), Expr::Sin(y))
        | (Expr::ArcCos(x), Expr::ArcCos(y))
        | (Expr::Abs(x), Expr::Abs(y)) => structural_eq(x, y, budget),
        (Expr::Add(x1, x2), Expr::Add(y1, y2))
        | (Expr::Sub(x1, x2), Expr::Sub(y1, y2))
        | (Expr::Mul(x1, x2), Expr::Mul(y1, y2))
        | (Expr::Div(x1, x2), Expr::Div(y1, y2)) => {
            structural_eq(x1, y1, budget) && structural_eq(x2, y2, budget)
        }
        (Expr::Pow(x, i), Expr::Pow(y, j)) => i == j && structural_eq(x, y, budget),
        _ => false,
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

// precedence: 0 add/sub, 1 mul/div, 2 atoms
fn write_expr(f: &mut fmt::Formatter<'_>, s: &Scalar, parent_prec: u8) -> fmt::Result {
    let prec = match &*s.0 {
        Expr::Add(..) | Expr::Sub(..) => 0,
        Expr::Mul(..) | Expr::Div(..) => 1,
        Expr::Rational(r) if r.is_negative() => 1,
        _ => 2,
    };
    let parens = prec < parent_prec;
    if parens {
        write!(f, "(")?;
    }
    match &*s.0 {
        Expr::Rational(r) => write!(f, "{}", r)?,
        Expr::Pi => write!(f, "pi")?,
        Expr::Digits(g) => write!(f, "{}", g.label())?,
        Expr::Sqrt(x) => {
            write!(f, "sqrt(")?;
            write_expr(f, x, 0)?;
            write!(f, ")")?;
        }
        Expr::Cos(x) => {
            write!(f, "cos(")?;
            write_expr(f, x, 0)?;
            write!(f, ")")?;
        }
        Expr::Sin(x) => {
            write!(f, "sin(")?;
            write_expr(f, x, 0)?;
            write!(f, ")")?;
        }
        Expr::ArcCos(x) => {
            write!(f, "arccos(")?;
            write_expr(f, x, 0)?;
            write!(f, ")")?;
        }
        Expr::Abs(x) => {
            write!(f, "abs(")?;
            write_expr(f, x, 0)?;
            write!(f, ")")?;
        }
        Expr::Add(a, b) => {
            write_expr(f, a, 0)?;
            write!(f, " + ")?;
            write_expr(f, b, 1)?;
        }
        Expr::Sub(a, b) => {
            write_expr(f, a, 0)?;
            write!(f, " - ")?;
            write_expr(f, b, 1)?;
        }
        Expr::Mul(a, b) => {
            write_expr(f, a, 1)?;
            write!(f, "*")?;
            write_expr(f, b, 2)?;
        }
        Expr::Div(a, b) => {
            write_expr(f, a, 1)?;
            write!(f, "/")?;
            write_expr(f, b, 2)?;
        }
        Expr::Pow(x, k) => {
            write_expr(f, x, 2)?;
            write!(f, "^{}", k)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}
