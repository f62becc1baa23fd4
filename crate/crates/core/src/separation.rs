//! Constructive witness finders: given two automata of a family and a
//! cutpoint, produce an input whose memberships provably differ, packaged as
//! a replayable certificate.
//!
//! Every finder re-simulates its witness through the automata module before
//! returning; a certificate that fails re-simulation is a bug, not a result.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automata::{AutomataError, CutpointAcceptor};
use crate::constructions::{
    closed_form_coeffs, cutpoint_lambda, qprime_pfa, rabin_alpha_pfa, rotation_qfa, unary_pfa_bx,
    ConstructionError,
};
use crate::scalar::{
    certified_compare, certified_sign, eval, CertifiedOrdering, Enclosure, IrrationalParam,
    KernelError, Scalar, Sign,
};

#[derive(Debug, Clone, Error)]
pub enum SeparationError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("scan budget exhausted after {cap} steps")]
    ScanBudgetExhausted { cap: u64 },
    #[error("digit budget exhausted at index {max_index}")]
    DigitBudgetExhausted { max_index: u64 },
    #[error("witness input length 2^({j}-3) overflows the supported range")]
    WitnessLengthOverflow { j: u64 },
    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// The separating input: a concrete binary word, or the length of a unary
/// power (long unary witnesses are kept as lengths).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessWord {
    Binary(String),
    Unary(u64),
}

impl fmt::Display for WitnessWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessWord::Binary(w) => write!(f, "{w}"),
            WitnessWord::Unary(n) => write!(f, "0^{n}"),
        }
    }
}

/// Digit context around the first differing binary digit of two parameters
/// in (0, 1/4).
#[derive(Clone, Debug)]
pub struct DigitContext {
    pub alpha: IrrationalParam,
    pub beta: IrrationalParam,
    /// Minimal index `j > 2` with differing digits.
    pub j: u64,
    /// Digits 1..=j of alpha (beta shares all but the last).
    alpha_prefix: Vec<bool>,
    pub beta_j: bool,
}

impl DigitContext {
    pub fn alpha_jm2(&self) -> bool {
        self.alpha_prefix[(self.j - 3) as usize]
    }

    pub fn alpha_jm1(&self) -> bool {
        self.alpha_prefix[(self.j - 2) as usize]
    }

    pub fn alpha_j(&self) -> bool {
        self.alpha_prefix[(self.j - 1) as usize]
    }

    /// Quadrant number 1..=4 determined by the shared digits
    /// (alpha_{j-2}, alpha_{j-1}).
    pub fn quadrant(&self) -> u8 {
        1 + 2 * u8::from(self.alpha_jm2()) + u8::from(self.alpha_jm1())
    }

    /// Integer part of `2^(j-3) * value`, shared by both parameters.
    fn shared_integer_part(&self) -> BigInt {
        let mut k = BigInt::zero();
        for idx in 0..self.j.saturating_sub(3) as usize {
            k <<= 1;
            if self.alpha_prefix[idx] {
                k += BigInt::one();
            }
        }
        k
    }
}

/// Reduced-angle data certifying one row of the quadrant table.
#[derive(Clone, Debug)]
pub struct QuadrantWitness {
    pub context: DigitContext,
    /// Input length `2^(j-3)`.
    pub input_len: u64,
    /// Reduced angles of (alpha, beta) after the input, in radians.
    pub theta_bar: (Scalar, Scalar),
    /// Remainders certifiably in (0, pi/4).
    pub theta_rem: (Scalar, Scalar),
    pub quadrant: u8,
    /// Expected membership verdicts (alpha, beta) at cutpoint 1/2.
    pub expected: (bool, bool),
}

/// Scan bookkeeping for the unary witness finders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanDetails {
    /// First length where the drift crosses pi (the two-sided bracket).
    pub bracket_first_crossing: u64,
    /// Length actually certified; equals the bracket in the common case.
    pub chosen: u64,
}

/// A separating input plus certified probability enclosures for both
/// acceptors proving the membership verdicts differ. Certificates embed
/// their acceptors and precision, so they replay bit-exactly.
#[derive(Clone, Debug)]
pub struct WitnessCertificate {
    pub witness: WitnessWord,
    pub acceptors: [CutpointAcceptor; 2],
    pub enclosures: [Enclosure; 2],
    pub verdicts: [bool; 2],
    pub precision_bits: u32,
    pub derivation: String,
    pub quadrant: Option<QuadrantWitness>,
    pub scan: Option<ScanDetails>,
}

impl WitnessCertificate {
    /// Re-simulate the witness and confirm the recorded verdicts and
    /// cutpoint exclusions.
    pub fn reverify(&self, max_bits: u32) -> Result<(), SeparationError> {
        if self.verdicts[0] == self.verdicts[1] {
            return Err(SeparationError::VerificationFailed(
                "verdicts do not differ".into(),
            ));
        }
        for side in 0..2 {
            let acc = &self.acceptors[side];
            let verdict = match &self.witness {
                WitnessWord::Binary(w) => acc.member(w, max_bits)?,
                WitnessWord::Unary(n) => acc.member_unary(*n, max_bits)?,
            };
            if verdict != self.verdicts[side] {
                return Err(SeparationError::VerificationFailed(format!(
                    "side {side} verdict changed under re-simulation"
                )));
            }
            let cut = eval(acc.cutpoint(), self.precision_bits)?;
            let enc = &self.enclosures[side];
            let disjoint = enc.lower() > cut.upper() || enc.upper() < cut.lower();
            if !disjoint {
                return Err(SeparationError::VerificationFailed(format!(
                    "side {side} enclosure does not exclude the cutpoint"
                )));
            }
        }
        Ok(())
    }
}

fn require_strictly_less(
    a: &Scalar,
    b: &Scalar,
    what: &str,
    max_bits: u32,
) -> Result<(), SeparationError> {
    match certified_compare(a, b, max_bits) {
        Ok(CertifiedOrdering::Less) => Ok(()),
        Ok(CertifiedOrdering::Greater) => Err(SeparationError::ParameterOutOfRange(format!(
            "{what}: {a} must be strictly less than {b}"
        ))),
        Err(e) if e.is_exact_tie() => Err(SeparationError::ParameterOutOfRange(format!(
            "{what}: values are exactly equal"
        ))),
        Err(e) => Err(SeparationError::Kernel(e)),
    }
}

/// Smallest integer strictly greater than `value`, certified.
fn certified_strict_floor_plus_one(
    value: &Scalar,
    max_bits: u32,
) -> Result<BigInt, KernelError> {
    if let Some(r) = value.as_rational() {
        return Ok(r.floor().to_integer() + BigInt::one());
    }
    let mut precision = 64u32;
    loop {
        let enc = eval(value, precision)?;
        let lo = enc.lower().floor().to_integer();
        let hi = enc.upper().floor().to_integer();
        if lo == hi {
            return Ok(lo + BigInt::one());
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

/// Evaluate `prob` at increasing precision until its enclosure is disjoint
/// from the cutpoint's; returns the enclosure and the precision used.
fn enclosure_excluding(
    prob: &Scalar,
    cutpoint: &Scalar,
    max_bits: u32,
) -> Result<(Enclosure, u32), SeparationError> {
    let mut precision = 128u32.min(max_bits);
    loop {
        let enc = eval(prob, precision)?;
        let cut = eval(cutpoint, precision)?;
        if enc.lower() > cut.upper() || enc.upper() < cut.lower() {
            return Ok((enc, precision));
        }
        if precision >= max_bits {
            return Err(SeparationError::Kernel(KernelError::PrecisionExhausted {
                max_bits,
                exact_tie: false,
            }));
        }
        precision = precision.saturating_mul(2).min(max_bits);
    }
}

// ---- density witnesses over the Rabin automaton ----

/// Shortest binary `z` with `l1 < bin(z reversed) < l2`, ties broken by the
/// smallest binary value. Exists with `|z| <= ceil(log2(1/(l2-l1))) + 1`
/// because dyadic rationals at that resolution hit any open interval.
pub fn find_density_witness(
    l1: &Scalar,
    l2: &Scalar,
    max_bits: u32,
) -> Result<String, SeparationError> {
    // 0 <= l1 < l2 <= 1, closed outer ends allowed.
    match certified_compare(l1, &Scalar::zero(), max_bits) {
        Ok(CertifiedOrdering::Greater) => {}
        Err(e) if e.is_exact_tie() => {}
        _ => {
            return Err(SeparationError::ParameterOutOfRange(
                "lower endpoint must be >= 0".into(),
            ))
        }
    }
    match certified_compare(l2, &Scalar::one(), max_bits) {
        Ok(CertifiedOrdering::Less) => {}
        Err(e) if e.is_exact_tie() => {}
        _ => {
            return Err(SeparationError::ParameterOutOfRange(
                "upper endpoint must be <= 1".into(),
            ))
        }
    }
    require_strictly_less(l1, l2, "density interval", max_bits)?;
    for len in 1..=128u32 {
        let two_pow = BigRational::from(BigInt::one() << len as usize);
        let scaled_l1 = &Scalar::from_big_rational(two_pow.clone()) * l1;
        let k = certified_strict_floor_plus_one(&scaled_l1, max_bits)?;
        if k.is_negative() || k >= (BigInt::one() << len as usize) {
            continue;
        }
        let candidate = Scalar::from_big_rational(BigRational::new(
            k.clone(),
            BigInt::one() << len as usize,
        ));
        let below = match certified_compare(&candidate, l2, max_bits) {
            Ok(CertifiedOrdering::Less) => true,
            Ok(CertifiedOrdering::Greater) => false,
            Err(e) if e.is_exact_tie() => false,
            Err(e) => return Err(SeparationError::Kernel(e)),
        };
        if below {
            // k's big-endian bits are z reversed.
            let reversed: String = (0..len)
                .rev()
                .map(|i| if k.bit(i as u64) { '1' } else { '0' })
                .collect();
            return Ok(reversed.chars().rev().collect());
        }
    }
    Err(SeparationError::ScanBudgetExhausted { cap: 128 })
}

/// Two scaled Rabin automata separated at a common cutpoint: finds `z` with
/// `a1 < bin(z rev) < a2` and certifies `z` is accepted by the
/// `lambda/a1`-scaled automaton and rejected by the `lambda/a2` one, both at
/// cutpoint `lambda`. Requires `0 < lambda < a1 < a2 < 1` so that both scale
/// factors stay in (0, 1].
pub fn scaled_pair_separation(
    lambda: &Scalar,
    alpha1: &Scalar,
    alpha2: &Scalar,
    max_bits: u32,
) -> Result<WitnessCertificate, SeparationError> {
    require_strictly_less(&Scalar::zero(), lambda, "cutpoint", max_bits)?;
    require_strictly_less(lambda, alpha1, "lambda vs alpha1", max_bits).map_err(|e| match e {
        SeparationError::ParameterOutOfRange(_) => SeparationError::ParameterOutOfRange(format!(
            "lambda = {lambda} must be strictly below alpha1 = {alpha1}, \
             otherwise the scaled parameter lambda/alpha1 leaves (0, 1]"
        )),
        other => other,
    })?;
    require_strictly_less(alpha1, alpha2, "alpha1 vs alpha2", max_bits)?;
    require_strictly_less(alpha2, &Scalar::one(), "alpha2", max_bits)?;

    let z = find_density_witness(alpha1, alpha2, max_bits)?;
    let scale_hi = lambda / alpha1;
    let scale_lo = lambda / alpha2;
    let pfa_hi = rabin_alpha_pfa(&scale_hi, max_bits)?;
    let pfa_lo = rabin_alpha_pfa(&scale_lo, max_bits)?;
    let acc_hi = CutpointAcceptor::new(pfa_hi, lambda.clone(), max_bits)?;
    let acc_lo = CutpointAcceptor::new(pfa_lo, lambda.clone(), max_bits)?;

    let in_hi = acc_hi.member(&z, max_bits)?;
    let in_lo = acc_lo.member(&z, max_bits)?;
    if !(in_hi && !in_lo) {
        return Err(SeparationError::VerificationFailed(format!(
            "expected (member, non-member) at z = {z}, got ({in_hi}, {in_lo})"
        )));
    }
    let prob_hi = acc_hi.automaton().accept_prob(&z)?;
    let prob_lo = acc_lo.automaton().accept_prob(&z)?;
    let (enc_hi, bits_hi) = enclosure_excluding(&prob_hi, lambda, max_bits)?;
    let (enc_lo, bits_lo) = enclosure_excluding(&prob_lo, lambda, max_bits)?;

    let certificate = WitnessCertificate {
        witness: WitnessWord::Binary(z.clone()),
        acceptors: [acc_hi, acc_lo],
        enclosures: [enc_hi, enc_lo],
        verdicts: [true, false],
        precision_bits: bits_hi.max(bits_lo),
        derivation: format!(
            "scaled-pair separation at cutpoint {lambda}: z = {z} with \
             bin(z rev) in ({alpha1}, {alpha2})"
        ),
        quadrant: None,
        scan: None,
    };
    certificate.reverify(max_bits)?;
    Ok(certificate)
}

// ---- quadrant witnesses for rotation QFAs ----

/// Minimal `j > 2` where the binary expansions of two certified-irrational
/// parameters in (0, 1/4) differ, with the surrounding digits.
pub fn first_diff_digit(
    alpha: &IrrationalParam,
    beta: &IrrationalParam,
    max_index: u64,
) -> Result<DigitContext, SeparationError> {
    for (name, p) in [("alpha", alpha), ("beta", beta)] {
        if !p.is_certified_irrational() {
            return Err(SeparationError::ParameterOutOfRange(format!(
                "{name} = {p} is not certified (or asserted) irrational"
            )));
        }
        let inside = crate::scalar::certify_in_range(
            &p.to_scalar(),
            &Scalar::zero(),
            crate::scalar::Bound::Open,
            &Scalar::rational(1, 4),
            crate::scalar::Bound::Open,
            4096,
        )?;
        if !inside {
            return Err(SeparationError::ParameterOutOfRange(format!(
                "{name} = {p} must lie in (0, 1/4)"
            )));
        }
    }
    let mut n = 16u64;
    loop {
        n = n.min(max_index);
        let digit_budget = (n as u32).saturating_mul(16).saturating_add(1024);
        let da = alpha.binary_digits(n, digit_budget)?;
        let db = beta.binary_digits(n, digit_budget)?;
        debug_assert!(!da.bits[0] && !da.bits[1] && !db.bits[0] && !db.bits[1]);
        if let Some(idx) = (2..n as usize).find(|&i| da.bits[i] != db.bits[i]) {
            let j = idx as u64 + 1;
            return Ok(DigitContext {
                alpha: alpha.clone(),
                beta: beta.clone(),
                j,
                alpha_prefix: da.bits[..=idx].to_vec(),
                beta_j: db.bits[idx],
            });
        }
        if n >= max_index {
            return Err(SeparationError::DigitBudgetExhausted { max_index });
        }
        n = n.saturating_mul(2);
    }
}

/// Expected (digit-1 side, digit-0 side) verdicts for a quadrant row.
fn quadrant_row_verdicts(quadrant: u8) -> (bool, bool) {
    match quadrant {
        1 | 3 => (false, true),
        2 | 4 => (true, false),
        _ => unreachable!("quadrants are 1..=4"),
    }
}

/// Separate two rotation QFAs with irrational parameters in (0, 1/4) at
/// cutpoint 1/2, using the input of length `2^(j-3)` where `j` is the first
/// differing binary digit. Verdicts follow the quadrant table and are
/// independently certified by direct simulation.
pub fn qfa_quadrant_witness(
    alpha: &IrrationalParam,
    beta: &IrrationalParam,
    max_bits: u32,
) -> Result<WitnessCertificate, SeparationError> {
    let ctx = first_diff_digit(alpha, beta, 60)?;
    if ctx.j > 60 {
        return Err(SeparationError::WitnessLengthOverflow { j: ctx.j });
    }
    let input_len = 1u64 << (ctx.j - 3);
    let quadrant = ctx.quadrant();
    let (one_expected, zero_expected) = quadrant_row_verdicts(quadrant);
    // The table is stated for alpha_j = 1; the opposite orientation swaps
    // the roles of the two automata.
    let swapped = !ctx.alpha_j();
    let (one_param, zero_param) = if swapped {
        (beta, alpha)
    } else {
        (alpha, beta)
    };

    let shared_int = ctx.shared_integer_part();
    let d2 = ctx.alpha_jm2();
    let d1 = ctx.alpha_jm1();
    let base8 = 4 * u8::from(d2) + 2 * u8::from(d1);
    let len_scalar = Scalar::from_big_rational(BigRational::from(BigInt::from(input_len)));
    let two_pi = &Scalar::integer(2) * &Scalar::pi();

    let mut reduced = Vec::new(); // (theta_bar, theta_rem, prob) per side
    for (param, last_digit) in [(one_param, 1u8), (zero_param, 0u8)] {
        let q8 = BigRational::new(BigInt::from(base8 + last_digit), BigInt::from(8));
        let offset = BigRational::from(shared_int.clone()) + q8.clone();
        let tail = &(&param.to_scalar() * &len_scalar) - &Scalar::from_big_rational(offset);
        let inside = crate::scalar::certify_in_range(
            &tail,
            &Scalar::zero(),
            crate::scalar::Bound::Open,
            &Scalar::rational(1, 8),
            crate::scalar::Bound::Open,
            max_bits,
        )?;
        if !inside {
            return Err(SeparationError::VerificationFailed(format!(
                "digit-shift remainder for {param} fell outside (0, 1/8)"
            )));
        }
        let theta_rem = &tail * &two_pi;
        let theta_bar = &(&Scalar::from_big_rational(q8) + &tail) * &two_pi;
        let prob = theta_bar.cos().square();
        reduced.push((theta_bar, theta_rem, prob));
    }

    let half = Scalar::rational(1, 2);
    for (side, expected) in [(0usize, one_expected), (1usize, zero_expected)] {
        let want = if expected {
            CertifiedOrdering::Greater
        } else {
            CertifiedOrdering::Less
        };
        let got = certified_compare(&reduced[side].2, &half, max_bits)?;
        if got != want {
            return Err(SeparationError::VerificationFailed(format!(
                "closed-form probability fell on the wrong side of 1/2 in quadrant {quadrant}"
            )));
        }
    }

    // Independent route: direct unitary simulation of both automata.
    let qfa_one = rotation_qfa(one_param, max_bits)?;
    let qfa_zero = rotation_qfa(zero_param, max_bits)?;
    let sim_one = qfa_one.accept_prob_unary(input_len)?;
    let sim_zero = qfa_zero.accept_prob_unary(input_len)?;
    for (sim, expected) in [(&sim_one, one_expected), (&sim_zero, zero_expected)] {
        let want = if expected {
            CertifiedOrdering::Greater
        } else {
            CertifiedOrdering::Less
        };
        if certified_compare(sim, &half, max_bits)? != want {
            return Err(SeparationError::VerificationFailed(
                "direct simulation disagrees with the quadrant table".into(),
            ));
        }
    }
    let (enc_one, bits_one) = enclosure_excluding(&sim_one, &half, max_bits)?;
    let (enc_zero, bits_zero) = enclosure_excluding(&sim_zero, &half, max_bits)?;

    // Map results back to (alpha, beta) order.
    let (verdict_a, verdict_b, enc_a, enc_b) = if swapped {
        (zero_expected, one_expected, enc_zero, enc_one)
    } else {
        (one_expected, zero_expected, enc_one, enc_zero)
    };
    let (bar_a, rem_a, bar_b, rem_b) = if swapped {
        (
            reduced[1].0.clone(),
            reduced[1].1.clone(),
            reduced[0].0.clone(),
            reduced[0].1.clone(),
        )
    } else {
        (
            reduced[0].0.clone(),
            reduced[0].1.clone(),
            reduced[1].0.clone(),
            reduced[1].1.clone(),
        )
    };
    let acc_a = CutpointAcceptor::new(rotation_qfa(alpha, max_bits)?, half.clone(), max_bits)?;
    let acc_b = CutpointAcceptor::new(rotation_qfa(beta, max_bits)?, half.clone(), max_bits)?;

    let certificate = WitnessCertificate {
        witness: WitnessWord::Unary(input_len),
        acceptors: [acc_a, acc_b],
        enclosures: [enc_a, enc_b],
        verdicts: [verdict_a, verdict_b],
        precision_bits: bits_one.max(bits_zero),
        derivation: format!(
            "quadrant witness: j = {}, quadrant {} ({}), input 0^{}",
            ctx.j,
            quadrant,
            if swapped {
                "orientation beta_j = 1"
            } else {
                "orientation alpha_j = 1"
            },
            input_len
        ),
        quadrant: Some(QuadrantWitness {
            context: ctx,
            input_len,
            theta_bar: (bar_a, bar_b),
            theta_rem: (rem_a, rem_b),
            quadrant,
            expected: (verdict_a, verdict_b),
        }),
        scan: None,
    };
    certificate.reverify(max_bits)?;
    Ok(certificate)
}

// ---- unary PFA witnesses ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// `Q_x` automata with per-automaton cutpoints `lambda_x = 1/(3x+1)`.
    VariableCutpoint,
    /// `Q'_x` automata (stochastic cubes) at the fixed cutpoint 1/2.
    FixedCutpoint,
}

/// Certified angle gaps for a parameter pair, plus the strict bounds that
/// guarantee the witness scan terminates: `theta` gap below pi/4 and
/// `gamma` gap below pi/9 in variable mode; `3*theta` gap below pi/3 and
/// combined gap below 4*pi/9 in fixed mode.
#[derive(Clone, Debug)]
pub struct DriftBounds {
    /// Drift of the cosine argument per input symbol (includes the factor 3
    /// in fixed mode).
    pub per_step: Scalar,
    pub theta_gap: Scalar,
    pub gamma_gap: Scalar,
    pub bounds_certified: bool,
}

pub fn angle_drift_bounds(
    x1: &Scalar,
    x2: &Scalar,
    mode: WitnessMode,
    max_bits: u32,
) -> Result<DriftBounds, SeparationError> {
    let (lo, hi) = mode_range(mode);
    for (name, x) in [("x1", x1), ("x2", x2)] {
        let inside = crate::scalar::certify_in_range(
            x,
            &Scalar::zero(),
            crate::scalar::Bound::Open,
            &hi,
            if mode == WitnessMode::VariableCutpoint {
                crate::scalar::Bound::Closed
            } else {
                crate::scalar::Bound::Open
            },
            max_bits,
        )?;
        if !inside {
            return Err(SeparationError::ParameterOutOfRange(format!(
                "{name} = {x} must lie in ({lo}, {hi}{}",
                if mode == WitnessMode::VariableCutpoint {
                    "]"
                } else {
                    ")"
                }
            )));
        }
    }
    let c1 = closed_form_coeffs(x1, max_bits)?;
    let c2 = closed_form_coeffs(x2, max_bits)?;
    let theta_gap = &c2.theta - &c1.theta;
    let gamma_gap = &c2.gamma - &c1.gamma;
    let per_step = match mode {
        WitnessMode::VariableCutpoint => theta_gap.clone(),
        WitnessMode::FixedCutpoint => &Scalar::integer(3) * &theta_gap,
    };
    let pi = Scalar::pi();
    let checks: Vec<(Scalar, Scalar)> = match mode {
        WitnessMode::VariableCutpoint => vec![
            (theta_gap.abs(), &pi * &Scalar::rational(1, 4)),
            (gamma_gap.abs(), &pi * &Scalar::rational(1, 9)),
        ],
        WitnessMode::FixedCutpoint => vec![
            (per_step.abs(), &pi * &Scalar::rational(1, 3)),
            (
                (&per_step + &gamma_gap).abs(),
                &pi * &Scalar::rational(4, 9),
            ),
        ],
    };
    let mut certified = true;
    for (value, bound) in checks {
        match certified_compare(&value, &bound, max_bits) {
            Ok(CertifiedOrdering::Less) => {}
            Ok(CertifiedOrdering::Greater) => certified = false,
            Err(e) if e.is_exact_tie() => certified = false,
            Err(e) => return Err(SeparationError::Kernel(e)),
        }
    }
    Ok(DriftBounds {
        per_step,
        theta_gap,
        gamma_gap,
        bounds_certified: certified,
    })
}

fn mode_range(mode: WitnessMode) -> (Scalar, Scalar) {
    match mode {
        WitnessMode::VariableCutpoint => (Scalar::zero(), Scalar::rational(1, 2)),
        WitnessMode::FixedCutpoint => (Scalar::zero(), Scalar::rational(1, 10)),
    }
}

/// Separate two unary PFAs constructively. Scans input lengths from the
/// first crossing of the drift bracket (`m*step + gap <= pi <
/// (m+1)*step + gap`), certifying at each candidate that the two cosine
/// phases have opposite signs; the first certified candidate becomes the
/// witness. Membership verdicts are then verified by direct simulation.
pub fn unary_pfa_witness(
    x1: &Scalar,
    x2: &Scalar,
    mode: WitnessMode,
    scan_cap: u64,
    max_bits: u32,
) -> Result<WitnessCertificate, SeparationError> {
    require_strictly_less(x1, x2, "x1 vs x2", max_bits)?;
    let bounds = angle_drift_bounds(x1, x2, mode, max_bits)?;
    if !bounds.bounds_certified {
        return Err(SeparationError::VerificationFailed(
            "angle drift bounds failed certification".into(),
        ));
    }
    let c1 = closed_form_coeffs(x1, max_bits)?;
    let c2 = closed_form_coeffs(x2, max_bits)?;
    let pi = Scalar::pi();
    let two_pi = &Scalar::integer(2) * &pi;
    let gap_at = |k: u64| -> Scalar {
        let kk = Scalar::from_big_rational(BigRational::from(BigInt::from(k)));
        &(&kk * &bounds.per_step) + &bounds.gamma_gap
    };

    // Estimate the crossing, then walk with certified comparisons.
    let est = {
        let step_enc = eval(&bounds.per_step, 160)?;
        let gap_enc = eval(&bounds.gamma_gap, 160)?;
        let pi_enc = eval(&pi, 160)?;
        if !step_enc.definitely_positive() {
            return Err(SeparationError::VerificationFailed(
                "drift per step is not certifiably positive".into(),
            ));
        }
        let num = pi_enc.upper() - gap_enc.lower();
        let den = step_enc.lower().clone();
        (num / den).floor().to_integer()
    };
    let mut k = if est.is_positive() {
        // Walk down first in case the estimate overshot.
        let mut probe = est.clone();
        while probe > BigInt::one() {
            let probe_u = bigint_to_u64(&probe, scan_cap)?;
            match certified_compare(&gap_at(probe_u - 1), &pi, max_bits) {
                Ok(CertifiedOrdering::Greater) => probe -= 1,
                Ok(CertifiedOrdering::Less) => break,
                Err(e) if e.is_exact_tie() => break,
                Err(e) => return Err(SeparationError::Kernel(e)),
            }
        }
        bigint_to_u64(&probe, scan_cap)?
    } else {
        1
    };
    let first_crossing = loop {
        if k > scan_cap {
            return Err(SeparationError::ScanBudgetExhausted { cap: scan_cap });
        }
        match certified_compare(&gap_at(k), &pi, max_bits) {
            Ok(CertifiedOrdering::Greater) => break k,
            Ok(CertifiedOrdering::Less) => k += 1,
            Err(e) if e.is_exact_tie() => k += 1,
            Err(e) => return Err(SeparationError::Kernel(e)),
        }
    };
    // Two-sided bracket certification at the crossing.
    if first_crossing > 1 {
        match certified_compare(&gap_at(first_crossing - 1), &pi, max_bits) {
            Ok(CertifiedOrdering::Less) => {}
            _ => {
                return Err(SeparationError::VerificationFailed(
                    "bracket lower side failed certification".into(),
                ))
            }
        }
    }
    match certified_compare(&gap_at(first_crossing), &two_pi, max_bits) {
        Ok(CertifiedOrdering::Less) => {}
        _ => {
            return Err(SeparationError::VerificationFailed(
                "bracket upper side failed certification".into(),
            ))
        }
    }

    // From the bracket on, certify opposite cosine signs. The bracket makes
    // the first candidate overwhelmingly likely; the walk covers the rare
    // pairs where the phases land two sign intervals apart.
    let phase_mult: u64 = match mode {
        WitnessMode::VariableCutpoint => 1,
        WitnessMode::FixedCutpoint => 3,
    };
    let phase_sign = |coeffs: &crate::constructions::ClosedFormCoefficients,
                      k: u64|
     -> Result<Sign, SeparationError> {
        let arg_mult =
            Scalar::from_big_rational(BigRational::from(BigInt::from(phase_mult * k)));
        let arg = &(&arg_mult * &coeffs.theta) + &coeffs.gamma;
        Ok(certified_sign(&arg.cos(), max_bits)?)
    };
    let mut chosen = first_crossing;
    let (sign1, sign2) = loop {
        if chosen > scan_cap || chosen > first_crossing + 10_000 {
            return Err(SeparationError::ScanBudgetExhausted { cap: scan_cap });
        }
        let s1 = phase_sign(&c1, chosen)?;
        let s2 = phase_sign(&c2, chosen)?;
        if s1 != s2 {
            break (s1, s2);
        }
        chosen += 1;
    };

    // Build acceptors and verify by direct simulation.
    let (acc1, acc2) = match mode {
        WitnessMode::VariableCutpoint => {
            let l1 = cutpoint_lambda(x1, max_bits)?;
            let l2 = cutpoint_lambda(x2, max_bits)?;
            (
                CutpointAcceptor::new(unary_pfa_bx(x1, max_bits)?, l1, max_bits)?,
                CutpointAcceptor::new(unary_pfa_bx(x2, max_bits)?, l2, max_bits)?,
            )
        }
        WitnessMode::FixedCutpoint => {
            let half = Scalar::rational(1, 2);
            (
                CutpointAcceptor::new(qprime_pfa(x1, max_bits)?, half.clone(), max_bits)?,
                CutpointAcceptor::new(qprime_pfa(x2, max_bits)?, half, max_bits)?,
            )
        }
    };
    let verdict1 = acc1.member_unary(chosen, max_bits)?;
    let verdict2 = acc2.member_unary(chosen, max_bits)?;
    if verdict1 != (sign1 == Sign::Positive) || verdict2 != (sign2 == Sign::Positive) {
        return Err(SeparationError::VerificationFailed(
            "membership verdicts disagree with certified cosine signs".into(),
        ));
    }
    let prob1 = acc1.automaton().accept_prob_unary(chosen)?;
    let prob2 = acc2.automaton().accept_prob_unary(chosen)?;
    let (enc1, bits1) = enclosure_excluding(&prob1, acc1.cutpoint(), max_bits)?;
    let (enc2, bits2) = enclosure_excluding(&prob2, acc2.cutpoint(), max_bits)?;

    let mode_name = match mode {
        WitnessMode::VariableCutpoint => "variable-cutpoint",
        WitnessMode::FixedCutpoint => "fixed-cutpoint",
    };
    let extended = if chosen == first_crossing {
        String::new()
    } else {
        format!(" (extended past the bracket to {chosen})")
    };
    let certificate = WitnessCertificate {
        witness: WitnessWord::Unary(chosen),
        acceptors: [acc1, acc2],
        enclosures: [enc1, enc2],
        verdicts: [verdict1, verdict2],
        precision_bits: bits1.max(bits2),
        derivation: format!(
            "{mode_name} unary witness: bracket crossing at length {first_crossing}{extended}"
        ),
        quadrant: None,
        scan: Some(ScanDetails {
            bracket_first_crossing: first_crossing,
            chosen,
        }),
    };
    certificate.reverify(max_bits)?;
    Ok(certificate)
}

fn bigint_to_u64(value: &BigInt, cap: u64) -> Result<u64, SeparationError> {
    use num_traits::ToPrimitive;
    value
        .to_u64()
        .filter(|&v| v <= cap.saturating_mul(2).saturating_add(4))
        .ok_or(SeparationError::ScanBudgetExhausted { cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    #[test]
    fn density_witness_examples() {
        assert_eq!(
            find_density_witness(&s(3, 10), &s(7, 10), 256).unwrap(),
            "1"
        );
        assert_eq!(find_density_witness(&s(0, 1), &s(1, 1), 256).unwrap(), "1");
        // decided by exhaustive enumeration: the shortest witness for
        // (5/8, 3/4) is z = "1101" with bin(z rev) = 11/16.
        assert_eq!(
            find_density_witness(&s(5, 8), &s(3, 4), 256).unwrap(),
            "1101"
        );
    }

    #[test]
    fn density_witness_matches_enumeration_oracle() {
        use crate::constructions::{bin_reverse, rabin_pfa};
        let p = rabin_pfa();
        let cases = [
            (s(5, 8), s(3, 4)),
            (s(1, 3), s(2, 3)),
            (s(9, 10), s(95, 100)),
            (s(1, 100), s(2, 100)),
        ];
        for (l1, l2) in cases {
            let got = find_density_witness(&l1, &l2, 256).unwrap();
            // brute-force: shortest length, then smallest bin value
            let (r1, r2) = (
                l1.as_rational().unwrap().clone(),
                l2.as_rational().unwrap().clone(),
            );
            let mut expected = None;
            'outer: for len in 1..=16usize {
                let mut best: Option<(BigRational, String)> = None;
                for bits in 0..(1u64 << len) {
                    let zr: String = (0..len)
                        .map(|i| {
                            if bits >> (len - 1 - i) & 1 == 1 {
                                '1'
                            } else {
                                '0'
                            }
                        })
                        .collect();
                    let z: String = zr.chars().rev().collect();
                    let v = bin_reverse(&z).unwrap();
                    if v > r1 && v < r2 {
                        if best.as_ref().map(|(b, _)| &v < b).unwrap_or(true) {
                            best = Some((v, z));
                        }
                    }
                }
                if let Some((_, z)) = best {
                    expected = Some(z);
                    break 'outer;
                }
            }
            let expected = expected.unwrap();
            assert_eq!(got, expected, "interval ({l1}, {l2})");
            // and the witness value really is the accept probability
            let prob = p.accept_prob(&got).unwrap();
            let prob = prob.as_rational().unwrap();
            assert!(prob > &r1 && prob < &r2);
        }
    }

    #[test]
    fn scaled_pair_basic() {
        let cert =
            scaled_pair_separation(&s(1, 4), &s(1, 3), &s(2, 3), 1024).unwrap();
        assert_eq!(cert.witness, WitnessWord::Binary("1".into()));
        assert_eq!(cert.verdicts, [true, false]);
        cert.reverify(1024).unwrap();
        // probabilities 3/8 > 1/4 and 3/16 < 1/4 per the worked example
        let p0 = cert.acceptors[0].automaton().accept_prob("1").unwrap();
        assert_eq!(p0.as_rational().unwrap(), &crate::scalar::big_rational(3, 8));
        let p1 = cert.acceptors[1].automaton().accept_prob("1").unwrap();
        assert_eq!(
            p1.as_rational().unwrap(),
            &crate::scalar::big_rational(3, 16)
        );
    }

    #[test]
    fn scaled_pair_requires_lambda_below_alpha1() {
        let err = scaled_pair_separation(&s(1, 2), &s(3, 10), &s(7, 10), 512).unwrap_err();
        assert!(matches!(err, SeparationError::ParameterOutOfRange(_)));
    }

    #[test]
    fn first_diff_digit_sqrt2_sqrt3() {
        let a = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 2);
        let b = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 3);
        let ctx = first_diff_digit(&a, &b, 64).unwrap();
        assert_eq!(ctx.j, 4);
        assert!(!ctx.alpha_jm2());
        assert!(ctx.alpha_jm1());
        assert!(!ctx.alpha_j()); // sqrt2/8 has digit 0 at j=4
        assert!(ctx.beta_j);
        assert_eq!(ctx.quadrant(), 2);
    }

    #[test]
    fn first_diff_digit_equal_params_exhausts() {
        let a = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 2);
        let b = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 2);
        let err = first_diff_digit(&a, &b, 32).unwrap_err();
        assert!(matches!(
            err,
            SeparationError::DigitBudgetExhausted { max_index: 32 }
        ));
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn quadrant_witness_sqrt2_sqrt3() {
        let a = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 2);
        let b = IrrationalParam::quadratic(BigRational::zero(), big(1, 8), 3);
        let cert = qfa_quadrant_witness(&a, &b, 1024).unwrap();
        assert_eq!(cert.witness, WitnessWord::Unary(2));
        // alpha = sqrt2/8 has alpha_4 = 0, so the orientation is swapped:
        // quadrant II row gives beta the > 1/2 side... with the swap, alpha
        // gets < 1/2 and beta > 1/2.
        assert_eq!(cert.verdicts, [false, true]);
        let q = cert.quadrant.as_ref().unwrap();
        assert_eq!(q.quadrant, 2);
        assert_eq!(q.input_len, 2);
        cert.reverify(1024).unwrap();
    }

    #[test]
    fn unary_witness_variable_mode() {
        let cert = unary_pfa_witness(
            &s(1, 4),
            &s(1, 2),
            WitnessMode::VariableCutpoint,
            1_000_000,
            2048,
        )
        .unwrap();
        let scan = cert.scan.unwrap();
        assert!(scan.chosen >= scan.bracket_first_crossing);
        assert_ne!(cert.verdicts[0], cert.verdicts[1]);
        cert.reverify(2048).unwrap();
    }

    #[test]
    fn unary_witness_fixed_mode() {
        let cert = unary_pfa_witness(
            &s(1, 100),
            &s(1, 20),
            WitnessMode::FixedCutpoint,
            1_000_000,
            2048,
        )
        .unwrap();
        assert_ne!(cert.verdicts[0], cert.verdicts[1]);
        assert_eq!(
            cert.acceptors[0].cutpoint().as_rational(),
            Some(&big(1, 2))
        );
        cert.reverify(2048).unwrap();
    }

    #[test]
    fn unary_witness_rejects_equal_parameters() {
        let err = unary_pfa_witness(
            &s(1, 4),
            &s(1, 4),
            WitnessMode::VariableCutpoint,
            1000,
            512,
        )
        .unwrap_err();
        assert!(matches!(err, SeparationError::ParameterOutOfRange(_)));
    }

    #[test]
    fn drift_bounds_zero_gap_for_equal_values() {
        let b = angle_drift_bounds(&s(1, 4), &s(1, 4), WitnessMode::VariableCutpoint, 512)
            .unwrap();
        assert!(b.bounds_certified);
        // theta and gamma trees for equal rational x are structurally
        // identical, so the gaps cancel to exact rational zero.
        assert!(b.theta_gap.as_rational().map(|r| r.is_zero()).unwrap_or(false)
            || eval(&b.theta_gap, 128).unwrap().contains_zero());
    }

    #[test]
    fn drift_bounds_certify_paper_claims() {
        let b = angle_drift_bounds(&s(1, 4), &s(1, 2), WitnessMode::VariableCutpoint, 1024)
            .unwrap();
        assert!(b.bounds_certified);
        let b = angle_drift_bounds(&s(1, 100), &s(9, 100), WitnessMode::FixedCutpoint, 1024)
            .unwrap();
        assert!(b.bounds_certified);
    }
}
