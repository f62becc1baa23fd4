//! Builders for the concrete automaton families and their closed-form
//! acceptance-probability oracles.
//!
//! Families:
//! - `rabin_pfa`: the two-state binary PFA with `f(w) = bin(w reversed)`;
//! - `rabin_alpha_pfa`: its scaled variant with `f(w) = alpha * bin(w rev)`;
//! - `rotation_qfa` / `rotation_qfa_exact`: two-state unary QFAs rotating by
//!   `alpha * 2*pi` per symbol;
//! - `unary_pfa_bx`: the three-state unary PFA with transition matrix `B_x`;
//! - `qprime_pfa`: the fixed-cutpoint variant built from the stochastic cube
//!   of `B_{x, (3x+1)/2}`.
//!
//! Closed forms are built verbatim from the coefficient formulas and must
//! agree with matrix simulation; tests enforce this on both the exact and
//! the certified-interval path.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::automata::{AutomataError, Pfa, Qfa};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{
    certify_in_range, Bound, IrrationalParam, KernelError, Scalar,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConstructionError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("word contains non-binary symbol {symbol:?}")]
    NonBinarySymbol { symbol: char },
    #[error("computed cube disagrees with its closed-form builder")]
    CubeMismatch,
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn require_range(
    x: &Scalar,
    lo: &Scalar,
    lo_bound: Bound,
    hi: &Scalar,
    hi_bound: Bound,
    what: &str,
    max_bits: u32,
) -> Result<(), ConstructionError> {
    match certify_in_range(x, lo, lo_bound, hi, hi_bound, max_bits) {
        Ok(true) => Ok(()),
        Ok(false) => Err(ConstructionError::ParameterOutOfRange(format!(
            "{what} = {x} violates its range"
        ))),
        Err(e) => Err(ConstructionError::Kernel(e)),
    }
}

// ---- Rabin's two-state binary PFA and its scaled variant ----

/// The two-state binary PFA with `A_0 = [[1, 1/2], [0, 1/2]]` and
/// `A_1 = [[1/2, 0], [1/2, 1]]`, initial state 0, accepting state 1.
pub fn rabin_pfa() -> Pfa {
    let a0 = Matrix::from_rows(vec![
        vec![Scalar::one(), Scalar::rational(1, 2)],
        vec![Scalar::zero(), Scalar::rational(1, 2)],
    ])
    .expect("square");
    let a1 = Matrix::from_rows(vec![
        vec![Scalar::rational(1, 2), Scalar::zero()],
        vec![Scalar::rational(1, 2), Scalar::one()],
    ])
    .expect("square");
    Pfa::new(
        vec!['0', '1'],
        vec![a0, a1],
        0,
        BTreeSet::from([1]),
        128,
    )
    .expect("stochastic by construction")
}

/// The scaled two-state PFA accepting `w` with probability
/// `alpha * bin(w reversed)`. The matrix for `0` is Rabin's `A_0`; the
/// matrix for `1` is `[[1 - a/2, (1-a)/2], [a/2, (1+a)/2]]`.
///
/// `alpha` must be certifiably in `(0, 1]`; at `alpha = 1` this is exactly
/// Rabin's automaton.
pub fn rabin_alpha_pfa(alpha: &Scalar, max_bits: u32) -> Result<Pfa, ConstructionError> {
    require_range(
        alpha,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::one(),
        Bound::Closed,
        "alpha",
        max_bits,
    )?;
    let a0 = Matrix::from_rows(vec![
        vec![Scalar::one(), Scalar::rational(1, 2)],
        vec![Scalar::zero(), Scalar::rational(1, 2)],
    ])?;
    // Columns are built as complement pairs sharing one subtree so the
    // symbolic column sums cancel exactly.
    let half_alpha = alpha / &Scalar::integer(2);
    let g = &(&Scalar::one() - alpha) / &Scalar::integer(2);
    let a1 = Matrix::from_rows(vec![
        vec![&Scalar::one() - &half_alpha, g.clone()],
        vec![half_alpha, &Scalar::one() - &g],
    ])?;
    Ok(Pfa::new(
        vec!['0', '1'],
        vec![a0, a1],
        0,
        BTreeSet::from([1]),
        max_bits,
    )?)
}

/// `bin(w reversed)` as an exact rational: the value of the reversed word
/// read as a binary fraction. The empty word maps to 0, matching the
/// automaton's empty-input acceptance.
pub fn bin_reverse(word: &str) -> Result<BigRational, ConstructionError> {
    let mut value = BigRational::zero();
    for (k, symbol) in word.chars().rev().enumerate() {
        match symbol {
            '0' => {}
            '1' => {
                value += BigRational::new(BigInt::one(), BigInt::one() << (k + 1));
            }
            other => return Err(ConstructionError::NonBinarySymbol { symbol: other }),
        }
    }
    Ok(value)
}

// ---- unary rotation QFAs ----

/// Two-state unary QFA rotating by `alpha * 2*pi` per input symbol; initial
/// and accepting state 0. `alpha` must be certifiably in `(0, 1)`.
pub fn rotation_qfa(alpha: &IrrationalParam, max_bits: u32) -> Result<Qfa, ConstructionError> {
    let value = alpha.to_scalar();
    require_range(
        &value,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::one(),
        Bound::Open,
        "alpha",
        max_bits,
    )?;
    let angle = &value * &(&Scalar::integer(2) * &Scalar::pi());
    let c = angle.cos();
    let s = angle.sin();
    let m = Matrix::from_rows(vec![
        vec![c.clone(), -&s],
        vec![s, c],
    ])?;
    Ok(Qfa::new(
        vec!['0'],
        vec![m],
        0,
        BTreeSet::from([0]),
        max_bits,
    )?)
}

/// Rotation QFA with exact rational cosine/sine; requires
/// `cos^2 + sin^2 = 1` exactly.
pub fn rotation_qfa_exact(
    cos: BigRational,
    sin: BigRational,
) -> Result<Qfa, ConstructionError> {
    if &cos * &cos + &sin * &sin != BigRational::one() {
        return Err(ConstructionError::ParameterOutOfRange(
            "cos^2 + sin^2 must equal 1 exactly".into(),
        ));
    }
    let c = Scalar::from_big_rational(cos);
    let s = Scalar::from_big_rational(sin);
    let m = Matrix::from_rows(vec![
        vec![c.clone(), -&s],
        vec![s, c],
    ])?;
    Ok(Qfa::new(
        vec!['0'],
        vec![m],
        0,
        BTreeSet::from([0]),
        128,
    )?)
}

/// The fixed rotation with matrix `[[3/5, -4/5], [4/5, 3/5]]`.
pub fn fixed_rotation_qfa() -> Qfa {
    rotation_qfa_exact(
        BigRational::new(3.into(), 5.into()),
        BigRational::new(4.into(), 5.into()),
    )
    .expect("3-4-5 is exactly unitary")
}

/// Exact acceptance probability of `0^j` for the fixed 3-4-5 rotation via
/// the angle-sum recurrence on rational cosine/sine pairs.
pub fn fixed_rotation_prob_oracle(j: u64) -> BigRational {
    let (c0, s0) = (
        BigRational::new(3.into(), 5.into()),
        BigRational::new(4.into(), 5.into()),
    );
    let mut c = BigRational::one();
    let mut s = BigRational::zero();
    for _ in 0..j {
        let next_c = &c * &c0 - &s * &s0;
        let next_s = &c * &s0 + &s * &c0;
        c = next_c;
        s = next_s;
    }
    &c * &c
}

/// `cos^2(j * alpha * 2*pi)` as a symbolic scalar.
pub fn qfa_prob_oracle(alpha: &IrrationalParam, j: u64) -> Scalar {
    let angle = &(&alpha.to_scalar() * &Scalar::from_big_rational(BigRational::from(
        BigInt::from(j) * BigInt::from(2),
    ))) * &Scalar::pi();
    angle.cos().square()
}

// ---- three-state unary PFAs ----

/// `B_x = [[0, 0, x], [1, 0, x], [0, 1, 1-2x]]`.
pub fn matrix_bx(x: &Scalar) -> Matrix {
    let one_minus_2x = &Scalar::one() - &(&Scalar::integer(2) * x);
    Matrix::from_rows(vec![
        vec![Scalar::zero(), Scalar::zero(), x.clone()],
        vec![Scalar::one(), Scalar::zero(), x.clone()],
        vec![Scalar::zero(), Scalar::one(), one_minus_2x],
    ])
    .expect("square")
}

/// Three-state unary PFA with matrix `B_x`, initial state 0, accepting
/// state 2. `x` must be certifiably in `(0, 1/2]`.
pub fn unary_pfa_bx(x: &Scalar, max_bits: u32) -> Result<Pfa, ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 2),
        Bound::Closed,
        "x",
        max_bits,
    )?;
    Ok(Pfa::new(
        vec!['0'],
        vec![matrix_bx(x)],
        0,
        BTreeSet::from([2]),
        max_bits,
    )?)
}

/// The coefficient bundle of the closed-form acceptance probability
/// `f(0^m) = a + 2 * amplitude * x^(m/2) * cos(m*theta + gamma)`.
#[derive(Clone, Debug)]
pub struct ClosedFormCoefficients {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    /// `sqrt(b^2 + c^2)`
    pub amplitude: Scalar,
    /// `arccos(-sqrt(x))`, in radians
    pub theta: Scalar,
    /// `arccos(b / amplitude)`, in radians
    pub gamma: Scalar,
    /// Real part of the conjugate eigenvalue pair: `-x`
    pub eigen_real: Scalar,
    /// Imaginary part: `sqrt(x - x^2)`
    pub eigen_imag: Scalar,
}

/// Coefficients `a = 1/(3x+1)`, `b = -1/(6x+2)`,
/// `c = (x+1)/((6x+2) * sqrt(x - x^2))` for `x` in `(0, 1/2]`.
pub fn closed_form_coeffs(
    x: &Scalar,
    max_bits: u32,
) -> Result<ClosedFormCoefficients, ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 2),
        Bound::Closed,
        "x",
        max_bits,
    )?;
    let three_x_plus_1 = &(&Scalar::integer(3) * x) + &Scalar::one();
    let six_x_plus_2 = &(&Scalar::integer(6) * x) + &Scalar::integer(2);
    let x_minus_x2 = x - &x.square();
    let root = x_minus_x2.sqrt();
    let a = &Scalar::one() / &three_x_plus_1;
    let b = -&(&Scalar::one() / &six_x_plus_2);
    let c = &(x + &Scalar::one()) / &(&six_x_plus_2 * &root);
    let amplitude = (&b.square() + &c.square()).sqrt();
    let theta = (-&x.sqrt()).arccos();
    let gamma = (&b / &amplitude).arccos();
    Ok(ClosedFormCoefficients {
        a,
        b,
        c,
        amplitude,
        theta,
        gamma,
        eigen_real: -x,
        eigen_imag: root,
    })
}

/// Closed-form acceptance probability of `0^m` for the `B_x` automaton:
/// `a + 2 * amplitude * sqrt(x)^m * cos(m*theta + gamma)`.
pub fn closed_form_prob(x: &Scalar, m: u64, max_bits: u32) -> Result<Scalar, ConstructionError> {
    let coeffs = closed_form_coeffs(x, max_bits)?;
    Ok(closed_form_prob_from(&coeffs, x, m))
}

fn closed_form_prob_from(coeffs: &ClosedFormCoefficients, x: &Scalar, m: u64) -> Scalar {
    let m_scalar = Scalar::from_big_rational(BigRational::from(BigInt::from(m)));
    let decay = x.sqrt().powi(m as i64);
    let phase = (&(&m_scalar * &coeffs.theta) + &coeffs.gamma).cos();
    &coeffs.a + &(&(&Scalar::integer(2) * &coeffs.amplitude) * &(&decay * &phase))
}

/// The cutpoint `lambda_x = a = 1/(3x+1)` for `x` in `(0, 1/2]`.
pub fn cutpoint_lambda(x: &Scalar, max_bits: u32) -> Result<Scalar, ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 2),
        Bound::Closed,
        "x",
        max_bits,
    )?;
    Ok(&Scalar::one() / &(&(&Scalar::integer(3) * x) + &Scalar::one()))
}

/// The eigenvalues of `B_x` as (real, imaginary) pairs:
/// `1`, `-x + sqrt(x - x^2) i`, `-x - sqrt(x - x^2) i`.
pub fn eigenvalues_bx(
    x: &Scalar,
    max_bits: u32,
) -> Result<[(Scalar, Scalar); 3], ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 2),
        Bound::Closed,
        "x",
        max_bits,
    )?;
    let imag = (x - &x.square()).sqrt();
    Ok([
        (Scalar::one(), Scalar::zero()),
        (-x, imag.clone()),
        (-x, -&imag),
    ])
}

/// `B_{x,alpha} = [[1-a, 1-a, 1+x-a], [a, a-1, a+x-1], [0, 1, 1-2x]]`,
/// generally not stochastic. Requires `x` in `(0, 1/10)` and `alpha` in
/// `(1/2, 1]`.
pub fn matrix_bx_alpha(
    x: &Scalar,
    alpha: &Scalar,
    max_bits: u32,
) -> Result<Matrix, ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 10),
        Bound::Open,
        "x",
        max_bits,
    )?;
    require_range(
        alpha,
        &Scalar::rational(1, 2),
        Bound::Open,
        &Scalar::one(),
        Bound::Closed,
        "alpha",
        max_bits,
    )?;
    let one = Scalar::one();
    Ok(Matrix::from_rows(vec![
        vec![
            &one - alpha,
            &one - alpha,
            &(&one + x) - alpha,
        ],
        vec![
            alpha.clone(),
            alpha - &one,
            &(alpha + x) - &one,
        ],
        vec![
            Scalar::zero(),
            one.clone(),
            &one - &(&Scalar::integer(2) * x),
        ],
    ])?)
}

/// The displayed polynomial form of `B_{x,alpha}^3`, kept as a redundant
/// builder: a transcription slip in the nine polynomial entries is the most
/// likely construction bug, so the computed cube must match this exactly.
fn qprime_cube_displayed(x: &Scalar, alpha: &Scalar) -> Result<Matrix, ConstructionError> {
    let one = Scalar::one();
    let two = Scalar::integer(2);
    let ax = alpha * x;
    let x2 = x.square();
    let x3 = x.powi(3);
    let row0 = vec![
        &(&one - alpha) + &ax,
        &(&(&one - alpha) + &ax) - &(&two * &x2),
        &(&(&(&one + &ax) - alpha) - &(&Scalar::integer(3) * &x2)) + &(&Scalar::integer(4) * &x3),
    ];
    let row1 = vec![
        ax.clone(),
        &(&ax + x) - &(&two * &x2),
        &(&(x + &ax) - &(&Scalar::integer(5) * &x2)) + &(&Scalar::integer(4) * &x3),
    ];
    let a_2ax = alpha - &(&(&two * alpha) * x);
    let row2 = vec![
        a_2ax.clone(),
        &(&a_2ax - x) + &(&Scalar::integer(4) * &x2),
        &(&(&a_2ax - x) + &(&Scalar::integer(8) * &x2)) - &(&Scalar::integer(8) * &x3),
    ];
    Ok(Matrix::from_rows(vec![row0, row1, row2])?)
}

/// The fixed-cutpoint three-state unary PFA: single matrix
/// `B_{x,(3x+1)/2}^3`, initial state 0, accepting state 2. The cube must be
/// exactly column-stochastic and must match the closed-form cube builder.
/// Requires `x` in `(0, 1/10)`.
pub fn qprime_pfa(x: &Scalar, max_bits: u32) -> Result<Pfa, ConstructionError> {
    let alpha = qprime_alpha(x);
    let base = matrix_bx_alpha(x, &alpha, max_bits)?;
    let cube = base.pow(3);
    let displayed = qprime_cube_displayed(x, &alpha)?;
    if let Some(equal) = cube.exact_eq(&displayed) {
        if !equal {
            return Err(ConstructionError::CubeMismatch);
        }
    }
    Ok(Pfa::new(
        vec!['0'],
        vec![cube],
        0,
        BTreeSet::from([2]),
        max_bits,
    )?)
}

/// The scaling parameter `alpha = (3x+1)/2` that pins the cutpoint to 1/2.
pub fn qprime_alpha(x: &Scalar) -> Scalar {
    &(&(&Scalar::integer(3) * x) + &Scalar::one()) / &Scalar::integer(2)
}

/// Primed coefficients `a' = alpha/(3x+1)`, `b' = -alpha/(6x+2)`,
/// `c' = alpha (x+1)/((6x+2) sqrt(x-x^2))`; exactly `alpha * (a, b, c)`.
pub fn primed_coefficients(
    x: &Scalar,
    alpha: &Scalar,
    max_bits: u32,
) -> Result<(Scalar, Scalar, Scalar), ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 10),
        Bound::Open,
        "x",
        max_bits,
    )?;
    require_range(
        alpha,
        &Scalar::rational(1, 2),
        Bound::Open,
        &Scalar::one(),
        Bound::Closed,
        "alpha",
        max_bits,
    )?;
    let three_x_plus_1 = &(&Scalar::integer(3) * x) + &Scalar::one();
    let six_x_plus_2 = &(&Scalar::integer(6) * x) + &Scalar::integer(2);
    let root = (x - &x.square()).sqrt();
    let a = alpha / &three_x_plus_1;
    let b = -&(alpha / &six_x_plus_2);
    let c = &(alpha * &(x + &Scalar::one())) / &(&six_x_plus_2 * &root);
    Ok((a, b, c))
}

/// Closed-form acceptance probability of `0^m` for the fixed-cutpoint
/// automaton: `alpha/(3x+1) + 2 alpha amplitude x^(3m/2) cos(3m theta +
/// gamma)` with `alpha = (3x+1)/2`, whose constant term is exactly 1/2.
pub fn primed_closed_form_prob(
    x: &Scalar,
    m: u64,
    max_bits: u32,
) -> Result<Scalar, ConstructionError> {
    require_range(
        x,
        &Scalar::zero(),
        Bound::Open,
        &Scalar::rational(1, 10),
        Bound::Open,
        "x",
        max_bits,
    )?;
    let coeffs = closed_form_coeffs(x, max_bits)?;
    let alpha = qprime_alpha(x);
    let three_x_plus_1 = &(&Scalar::integer(3) * x) + &Scalar::one();
    let constant = &alpha / &three_x_plus_1;
    let m3 = 3 * m;
    let m3_scalar = Scalar::from_big_rational(BigRational::from(BigInt::from(m3)));
    let decay = x.sqrt().powi(m3 as i64);
    let phase = (&(&m3_scalar * &coeffs.theta) + &coeffs.gamma).cos();
    Ok(&constant
        + &(&(&(&Scalar::integer(2) * &alpha) * &coeffs.amplitude) * &(&decay * &phase)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{certified_compare, eval, CertifiedOrdering};
    use num_traits::Signed;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bin_reverse_oracle_values() {
        assert_eq!(bin_reverse("1").unwrap(), rat(1, 2));
        assert_eq!(bin_reverse("10").unwrap(), rat(1, 4));
        assert_eq!(bin_reverse("011").unwrap(), rat(3, 4));
        assert_eq!(bin_reverse("0000").unwrap(), rat(0, 1));
        assert_eq!(bin_reverse("").unwrap(), rat(0, 1));
        assert!(matches!(
            bin_reverse("10x"),
            Err(ConstructionError::NonBinarySymbol { symbol: 'x' })
        ));
    }

    #[test]
    fn rabin_identity_small_words() {
        let p = rabin_pfa();
        for len in 0..=8usize {
            for bits in 0..(1u32 << len) {
                let w: String = (0..len)
                    .map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
                    .collect();
                assert_eq!(
                    p.accept_prob(&w).unwrap().as_rational().unwrap(),
                    &bin_reverse(&w).unwrap(),
                    "mismatch at {w:?}"
                );
            }
        }
    }

    #[test]
    fn rabin_alpha_scaling_identity() {
        for (n, d) in [(1i64, 7i64), (1, 3), (2, 5), (9, 10)] {
            let alpha = Scalar::rational(n, d);
            let p = rabin_alpha_pfa(&alpha, 256).unwrap();
            for len in 0..=7usize {
                for bits in 0..(1u32 << len) {
                    let w: String = (0..len)
                        .map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
                        .collect();
                    let expected = rat(n, d) * bin_reverse(&w).unwrap();
                    assert_eq!(
                        p.accept_prob(&w).unwrap().as_rational().unwrap(),
                        &expected,
                        "alpha = {n}/{d}, w = {w:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rabin_alpha_one_is_rabin() {
        let p = rabin_alpha_pfa(&Scalar::one(), 128).unwrap();
        let q = rabin_pfa();
        for w in ["", "1", "0", "110", "101101"] {
            assert_eq!(
                p.accept_prob(w).unwrap().as_rational(),
                q.accept_prob(w).unwrap().as_rational()
            );
        }
    }

    #[test]
    fn rabin_alpha_range_is_enforced() {
        assert!(rabin_alpha_pfa(&Scalar::rational(3, 2), 128).is_err());
        assert!(rabin_alpha_pfa(&Scalar::zero(), 128).is_err());
        // base case: alpha = 1/2, w = "1" gives alpha/2 = 1/4
        let p = rabin_alpha_pfa(&Scalar::rational(1, 2), 128).unwrap();
        assert_eq!(p.accept_prob("1").unwrap().as_rational().unwrap(), &rat(1, 4));
        // alpha = 1/3, w = "11" gives (1/3)(3/4) = 1/4
        let p = rabin_alpha_pfa(&Scalar::rational(1, 3), 128).unwrap();
        assert_eq!(p.accept_prob("11").unwrap().as_rational().unwrap(), &rat(1, 4));
    }

    #[test]
    fn rabin_alpha_with_irrational_parameter() {
        // alpha = 1/sqrt(2): column sums certify through linear forms.
        let alpha = &Scalar::one() / &Scalar::integer(2).sqrt();
        let p = rabin_alpha_pfa(&alpha, 512).unwrap();
        let prob = p.accept_prob("1").unwrap();
        // f("1") = alpha/2 = 1/(2 sqrt 2): check against alpha * bin("1").
        let expected = &alpha * &Scalar::rational(1, 2);
        let enc = eval(&(&prob - &expected), 128).unwrap();
        assert!(enc.contains_zero());
        let val = eval(&prob, 64).unwrap();
        assert!(val.lower() > &rat(35, 100) && val.upper() < &rat(36, 100));
    }

    #[test]
    fn fixed_rotation_oracle_and_simulation_agree_exactly() {
        let q = fixed_rotation_qfa();
        for j in 0..=64u64 {
            let w: String = std::iter::repeat('0').take(j as usize).collect();
            let sim = q.accept_prob(&w).unwrap();
            assert_eq!(
                sim.as_rational().unwrap(),
                &fixed_rotation_prob_oracle(j),
                "mismatch at j = {j}"
            );
        }
    }

    #[test]
    fn fixed_rotation_known_values() {
        assert_eq!(fixed_rotation_prob_oracle(0), rat(1, 1));
        assert_eq!(fixed_rotation_prob_oracle(1), rat(9, 25));
        assert_eq!(fixed_rotation_prob_oracle(2), rat(49, 625));
        let q = fixed_rotation_qfa();
        assert_eq!(q.accept_prob("").unwrap().as_rational().unwrap(), &rat(1, 1));
        assert_eq!(q.accept_prob("0").unwrap().as_rational().unwrap(), &rat(9, 25));
        assert_eq!(
            q.accept_prob("00").unwrap().as_rational().unwrap(),
            &rat(49, 625)
        );
    }

    #[test]
    fn symbolic_rotation_simulation_matches_cos_oracle() {
        let alpha = IrrationalParam::quadratic(BigRational::zero(), rat(1, 8), 2);
        let q = rotation_qfa(&alpha, 512).unwrap();
        for j in [1u64, 2, 3, 5, 8] {
            let sim = q.accept_prob_unary(j).unwrap();
            let oracle = qfa_prob_oracle(&alpha, j);
            let diff = &sim - &oracle;
            let enc = eval(&diff, 160).unwrap();
            assert!(
                enc.contains_zero(),
                "simulation and oracle disagree at j = {j}"
            );
            assert!(enc.width() < rat(1, 1i64 << 62));
        }
    }

    #[test]
    fn bx_matrix_initial_conditions() {
        for (n, d) in [(1i64, 2i64), (1, 4), (1, 10)] {
            let x = Scalar::rational(n, d);
            let p = unary_pfa_bx(&x, 256).unwrap();
            assert!(p.accept_prob("").unwrap().as_rational().unwrap().is_zero());
            assert!(p.accept_prob("0").unwrap().as_rational().unwrap().is_zero());
            assert_eq!(
                p.accept_prob("00").unwrap().as_rational().unwrap(),
                &BigRational::one()
            );
        }
        // x = 1/2: the three-step chain lands on 0.
        let p = unary_pfa_bx(&Scalar::rational(1, 2), 256).unwrap();
        assert!(p.accept_prob("000").unwrap().as_rational().unwrap().is_zero());
    }

    #[test]
    fn closed_form_coefficients_at_one_half() {
        let coeffs = closed_form_coeffs(&Scalar::rational(1, 2), 256).unwrap();
        assert_eq!(coeffs.a.as_rational().unwrap(), &rat(2, 5));
        assert_eq!(coeffs.b.as_rational().unwrap(), &rat(-1, 5));
        assert_eq!(coeffs.c.as_rational().unwrap(), &rat(3, 5));
        // amplitude = sqrt(1/25 + 9/25) = sqrt(10)/5
        let amp_sq = coeffs.amplitude.square();
        assert_eq!(amp_sq.as_rational().unwrap(), &rat(10, 25));
        // theta_{1/2} = 3*pi/4: the enclosure must contain it.
        let diff = &coeffs.theta - &(&Scalar::pi() * &Scalar::rational(3, 4));
        let enc = eval(&diff, 192).unwrap();
        assert!(enc.contains_zero());
    }

    #[test]
    fn closed_form_matches_matrix_power() {
        for (n, d) in [(1i64, 10i64), (1, 4), (1, 2)] {
            let x = Scalar::rational(n, d);
            let p = unary_pfa_bx(&x, 256).unwrap();
            for m in [0u64, 1, 2, 3, 7, 12, 25] {
                let exact = p.accept_prob_unary(m).unwrap();
                let cf = closed_form_prob(&x, m, 256).unwrap();
                let diff = &cf - &exact;
                let enc = eval(&diff, 128).unwrap();
                assert!(enc.contains_zero(), "x={n}/{d}, m={m}");
            }
        }
    }

    #[test]
    fn cutpoint_lambda_values() {
        assert_eq!(
            cutpoint_lambda(&Scalar::rational(1, 3), 128)
                .unwrap()
                .as_rational()
                .unwrap(),
            &rat(1, 2)
        );
        assert_eq!(
            cutpoint_lambda(&Scalar::rational(1, 2), 128)
                .unwrap()
                .as_rational()
                .unwrap(),
            &rat(2, 5)
        );
        assert_eq!(
            cutpoint_lambda(&Scalar::rational(1, 1000), 128)
                .unwrap()
                .as_rational()
                .unwrap(),
            &rat(1000, 1003)
        );
    }

    #[test]
    fn bx_alpha_matrix_entries() {
        let x = Scalar::rational(1, 16);
        let alpha = Scalar::rational(19, 32);
        let m = matrix_bx_alpha(&x, &alpha, 256).unwrap();
        assert_eq!(m.entry(1, 1).as_rational().unwrap(), &rat(-13, 32));
        assert_eq!(m.entry(2, 0).as_rational().unwrap(), &rat(0, 1));
        assert_eq!(m.entry(2, 1).as_rational().unwrap(), &rat(1, 1));
        assert_eq!(m.entry(2, 2).as_rational().unwrap(), &rat(7, 8));
        assert!(!m.is_column_stochastic(256).unwrap());
        // but its cube is stochastic
        assert!(m.pow(3).is_column_stochastic(256).unwrap());
    }

    #[test]
    fn qprime_values_at_one_sixteenth() {
        let x = Scalar::rational(1, 16);
        let p = qprime_pfa(&x, 256).unwrap();
        assert!(p.accept_prob("").unwrap().as_rational().unwrap().is_zero());
        assert_eq!(
            p.accept_prob("0").unwrap().as_rational().unwrap(),
            &rat(133, 256)
        );
        // f_{Q'}(0^m) = alpha * f_{Q_x}(0^{3m})
        let alpha = rat(19, 32);
        let bx = unary_pfa_bx(&x, 256).unwrap();
        for m in 0..=6u64 {
            let lhs = p.accept_prob_unary(m).unwrap();
            let rhs = &alpha * bx.accept_prob_unary(3 * m).unwrap().as_rational().unwrap();
            assert_eq!(lhs.as_rational().unwrap(), &rhs);
        }
    }

    #[test]
    fn primed_constant_term_is_exactly_half() {
        for (n, d) in [(1i64, 16i64), (1, 100), (7, 80), (9, 91)] {
            let x = Scalar::rational(n, d);
            let prob0 = primed_closed_form_prob(&x, 0, 256).unwrap();
            // at m = 0 the closed form must equal 0 = 1/2 + 2 alpha amp cos(gamma)
            let p = qprime_pfa(&x, 256).unwrap();
            assert!(p.accept_prob("").unwrap().as_rational().unwrap().is_zero());
            let enc = eval(&prob0, 128).unwrap();
            assert!(enc.contains_zero());
            // the constant term alone:
            let alpha = qprime_alpha(&x);
            let c = &alpha / &(&(&Scalar::integer(3) * &x) + &Scalar::one());
            assert_eq!(c.as_rational().unwrap(), &rat(1, 2));
        }
    }

    #[test]
    fn primed_coefficients_scale_the_unprimed_ones() {
        let x = Scalar::rational(1, 16);
        let alpha = Scalar::rational(19, 32);
        let (ap, bp, _cp) = primed_coefficients(&x, &alpha, 256).unwrap();
        assert_eq!(ap.as_rational().unwrap(), &rat(1, 2));
        let coeffs = closed_form_coeffs(&x, 256).unwrap();
        let expected_b = rat(19, 32) * coeffs.b.as_rational().unwrap();
        assert_eq!(bp.as_rational().unwrap(), &expected_b);
        // alpha = 1 reduces to the unprimed coefficients
        let (a1, b1, _c1) = primed_coefficients(&x, &Scalar::one(), 256).unwrap();
        assert_eq!(a1.as_rational(), coeffs.a.as_rational());
        assert_eq!(b1.as_rational(), coeffs.b.as_rational());
    }

    #[test]
    fn eigenvalue_conjugate_identities() {
        let x = Scalar::rational(1, 4);
        let [r1, r2, r3] = eigenvalues_bx(&x, 128).unwrap();
        assert_eq!(r1.0.as_rational().unwrap(), &rat(1, 1));
        // r2 * r3 = x (product of conjugates = |r|^2 = x)
        let prod_real = &(&r2.0 * &r3.0) - &(&r2.1 * &r3.1);
        assert_eq!(prod_real.as_rational().unwrap(), &rat(1, 4));
        // r2 + r3 = -2x
        let sum_real = &r2.0 + &r3.0;
        assert_eq!(sum_real.as_rational().unwrap(), &rat(-1, 2));
        let sum_imag = &r2.1 + &r3.1;
        assert!(sum_imag.as_rational().is_none() || sum_imag.as_rational().unwrap().is_zero());
        // |r2| = sqrt(x): squared magnitude is x
        let mag_sq = &r2.0.square() + &r2.1.square();
        assert_eq!(mag_sq.as_rational().unwrap(), &rat(1, 4));
    }

    #[test]
    fn lambda_sign_tracks_cosine_sign() {
        // f(0^m) - lambda has the sign of cos(m theta + gamma).
        let x = Scalar::rational(1, 4);
        let p = unary_pfa_bx(&x, 256).unwrap();
        let lam = cutpoint_lambda(&x, 256).unwrap();
        let coeffs = closed_form_coeffs(&x, 256).unwrap();
        for m in 1..=20u64 {
            let prob = p.accept_prob_unary(m).unwrap();
            let diff = prob.as_rational().unwrap() - lam.as_rational().unwrap();
            if diff.is_zero() {
                continue;
            }
            let m_scalar = Scalar::from_big_rational(BigRational::from(BigInt::from(m)));
            let cosine = (&(&m_scalar * &coeffs.theta) + &coeffs.gamma).cos();
            let expected = if diff.is_positive() {
                CertifiedOrdering::Greater
            } else {
                CertifiedOrdering::Less
            };
            assert_eq!(
                certified_compare(&cosine, &Scalar::zero(), 512).unwrap(),
                expected,
                "m = {m}"
            );
        }
    }
}
