//! Exact number parsing and decimal rendering.
//!
//! Accepted forms: integers (`3`, `-2`), rationals (`19/32`), and quadratic
//! irrationals built from them with `sqrt(d)`: `sqrt(2)/8`, `3*sqrt(5)/7`,
//! `1/2 + 1/4*sqrt(5)`, `1/2 - sqrt(2)/8`. Never floats: decimal points are
//! rejected so no precision is silently lost.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use cutpoints::scalar::{IrrationalParam, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

/// A parsed exact number: rational plus an optional sqrt term over one
/// radicand, i.e. `p + q*sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactNumber {
    pub rational: BigRational,
    pub root_coeff: BigRational,
    pub radicand: u64,
}

impl ExactNumber {
    fn pure(rational: BigRational) -> ExactNumber {
        ExactNumber {
            rational,
            root_coeff: BigRational::zero(),
            radicand: 0,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.root_coeff.is_zero()
    }

    pub fn to_scalar(&self) -> Scalar {
        if self.is_rational() {
            Scalar::from_big_rational(self.rational.clone())
        } else {
            Scalar::quad_irrational(
                self.rational.clone(),
                self.root_coeff.clone(),
                self.radicand,
            )
        }
    }

    pub fn to_param(&self) -> IrrationalParam {
        if self.is_rational() {
            IrrationalParam::Rational(self.rational.clone())
        } else {
            IrrationalParam::quadratic(
                self.rational.clone(),
                self.root_coeff.clone(),
                self.radicand,
            )
        }
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.text[self.pos..].starts_with('-') {
            self.pos += 1;
        }
        while self.text[self.pos..]
            .chars()
            .next()
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let token = &self.text[start..self.pos];
        if token.is_empty() || token == "-" {
            return Err(self.error("expected an integer"));
        }
        token
            .parse()
            .map_err(|_| self.error(format!("bad integer {token:?}")))
    }
}

/// Parse one exact number, consuming the whole string.
pub fn parse_exact(text: &str) -> Result<ExactNumber, ParseError> {
    if text.contains('.') {
        return Err(ParseError {
            column: text.find('.').unwrap() + 1,
            message: "decimal literals are not accepted; use exact rationals like 7/10".into(),
        });
    }
    let mut lx = Lexer::new(text);
    let mut value = parse_term(&mut lx)?;
    loop {
        match lx.peek() {
            Some('+') => {
                lx.bump();
                let rhs = parse_term(&mut lx)?;
                value = add(value, rhs).map_err(|m| lx.error(m))?;
            }
            Some('-') => {
                lx.bump();
                let mut rhs = parse_term(&mut lx)?;
                rhs.rational = -rhs.rational;
                rhs.root_coeff = -rhs.root_coeff;
                value = add(value, rhs).map_err(|m| lx.error(m))?;
            }
            Some(c) => return Err(lx.error(format!("unexpected character {c:?}"))),
            None => return Ok(value),
        }
    }
}

fn add(mut a: ExactNumber, b: ExactNumber) -> Result<ExactNumber, String> {
    a.rational += b.rational;
    if b.root_coeff.is_zero() {
        return Ok(a);
    }
    if a.root_coeff.is_zero() {
        a.root_coeff = b.root_coeff;
        a.radicand = b.radicand;
        return Ok(a);
    }
    if a.radicand != b.radicand {
        return Err(format!(
            "mixed radicands sqrt({}) and sqrt({}) are not supported",
            a.radicand, b.radicand
        ));
    }
    a.root_coeff += b.root_coeff;
    Ok(a)
}

// term := factor (('*' | '/') factor)*
fn parse_term(lx: &mut Lexer) -> Result<ExactNumber, ParseError> {
    let mut value = parse_factor(lx)?;
    loop {
        match lx.peek() {
            Some('*') => {
                lx.bump();
                let rhs = parse_factor(lx)?;
                value = multiply(value, rhs).map_err(|m| lx.error(m))?;
            }
            Some('/') => {
                lx.bump();
                let rhs = parse_factor(lx)?;
                value = divide(value, rhs).map_err(|m| lx.error(m))?;
            }
            _ => return Ok(value),
        }
    }
}

fn multiply(a: ExactNumber, b: ExactNumber) -> Result<ExactNumber, String> {
    if !a.is_rational() && !b.is_rational() {
        return Err("products of two sqrt terms are not supported".into());
    }
    let (scale, mut irr) = if a.is_rational() { (a, b) } else { (b, a) };
    irr.rational *= &scale.rational;
    irr.root_coeff *= &scale.rational;
    Ok(irr)
}

fn divide(mut a: ExactNumber, b: ExactNumber) -> Result<ExactNumber, String> {
    if !b.is_rational() {
        return Err("division by a sqrt term is not supported".into());
    }
    if b.rational.is_zero() {
        return Err("division by zero".into());
    }
    a.rational /= &b.rational;
    a.root_coeff /= &b.rational;
    Ok(a)
}

// factor := integer ['/' integer handled by term] | 'sqrt(' integer ')'
fn parse_factor(lx: &mut Lexer) -> Result<ExactNumber, ParseError> {
    lx.skip_ws();
    if lx.text[lx.pos..].starts_with("sqrt(") {
        lx.pos += 5;
        let d = lx.integer()?;
        if lx.bump() != Some(')') {
            return Err(lx.error("expected ')' after sqrt radicand"));
        }
        if d.is_negative() {
            return Err(lx.error("sqrt radicand must be nonnegative"));
        }
        let d_u64: u64 = d
            .try_into()
            .map_err(|_| lx.error("sqrt radicand too large"))?;
        // Perfect squares fold to rationals immediately.
        let root = (d_u64 as f64).sqrt() as u64;
        for c in root.saturating_sub(1)..=root + 1 {
            if c.checked_mul(c) == Some(d_u64) {
                return Ok(ExactNumber::pure(BigRational::from(BigInt::from(c))));
            }
        }
        return Ok(ExactNumber {
            rational: BigRational::zero(),
            root_coeff: BigRational::one(),
            radicand: d_u64,
        });
    }
    let n = lx.integer()?;
    Ok(ExactNumber::pure(BigRational::from(n)))
}

/// Render a rational as `p/q` (or `p` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with outward rounding: `round_up` rounds toward
/// positive infinity, otherwise toward negative infinity.
pub fn decimal_string(r: &BigRational, digits: usize, round_up: bool) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = r * BigRational::from(scale.clone());
    let floor = scaled.floor().to_integer();
    let v = if round_up && &BigRational::from(floor.clone()) != &scaled {
        floor + BigInt::one()
    } else {
        floor
    };
    let negative = v.is_negative();
    let mag = v.magnitude().to_string();
    let padded = if mag.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - mag.len()), mag)
    } else {
        let (int_part, frac_part) = mag.split_at(mag.len() - digits);
        format!("{int_part}.{frac_part}")
    };
    if negative {
        format!("-{padded}")
    } else {
        padded
    }
}

/// Enclosure rendering: `[lo, hi]@bits` with outward decimal rounding.
pub fn enclosure_string(e: &cutpoints::Enclosure, digits: usize) -> String {
    format!(
        "[{}, {}]@{}",
        decimal_string(e.lower(), digits, false),
        decimal_string(e.upper(), digits, true),
        e.precision_bits()
    )
}

/// A probability (or any scalar) as an exact rational when possible,
/// otherwise a decimal enclosure at the given precision.
pub fn scalar_string(
    s: &Scalar,
    precision_bits: u32,
) -> Result<String, cutpoints::KernelError> {
    if let Some(r) = s.as_rational() {
        return Ok(rational_string(r));
    }
    let enc = cutpoints::scalar::eval(s, precision_bits)?;
    Ok(enclosure_string(&enc, enclosure_digits(precision_bits)))
}

pub fn enclosure_digits(precision_bits: u32) -> usize {
    // log10(2) ~ 0.30103; stay a bit under the binary precision.
    ((precision_bits as f64) * 0.30103).floor().max(6.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rationals_and_integers() {
        assert_eq!(parse_exact("19/32").unwrap().rational, big(19, 32));
        assert_eq!(parse_exact("-3").unwrap().rational, big(-3, 1));
        assert_eq!(parse_exact(" 1/2 ").unwrap().rational, big(1, 2));
    }

    #[test]
    fn parses_quadratic_forms() {
        let n = parse_exact("sqrt(2)/8").unwrap();
        assert_eq!(n.rational, BigRational::zero());
        assert_eq!(n.root_coeff, big(1, 8));
        assert_eq!(n.radicand, 2);

        let n = parse_exact("1/2 + 1/4*sqrt(5)").unwrap();
        assert_eq!(n.rational, big(1, 2));
        assert_eq!(n.root_coeff, big(1, 4));
        assert_eq!(n.radicand, 5);

        let n = parse_exact("1/2 - sqrt(2)/8").unwrap();
        assert_eq!(n.root_coeff, big(-1, 8));

        let n = parse_exact("3*sqrt(7)/5").unwrap();
        assert_eq!(n.root_coeff, big(3, 5));
    }

    #[test]
    fn perfect_square_radicands_fold() {
        let n = parse_exact("sqrt(9)/2").unwrap();
        assert!(n.is_rational());
        assert_eq!(n.rational, big(3, 2));
    }

    #[test]
    fn rejects_floats_and_mixed_radicands() {
        assert!(parse_exact("0.5").is_err());
        assert!(parse_exact("sqrt(2) + sqrt(3)").is_err());
        assert!(parse_exact("1/0").is_err());
        let err = parse_exact("7x").unwrap_err();
        assert_eq!(err.column, 2);
    }

    #[test]
    fn decimal_rendering_rounds_outward() {
        let third = big(1, 3);
        assert_eq!(decimal_string(&third, 6, false), "0.333333");
        assert_eq!(decimal_string(&third, 6, true), "0.333334");
        let neg = big(-1, 3);
        assert_eq!(decimal_string(&neg, 6, false), "-0.333334");
        assert_eq!(decimal_string(&neg, 6, true), "-0.333333");
        assert_eq!(decimal_string(&big(5, 4), 3, false), "1.250");
    }
}
