//! The `verify` subcommand: a condensed battery of the toolkit's claims,
//! one pass/fail line per check.

use num_rational::BigRational;

use cutpoints::automata::CutpointAcceptor;
use cutpoints::constructions::{
    bin_reverse, closed_form_coeffs, closed_form_prob, fixed_rotation_prob_oracle,
    fixed_rotation_qfa, qprime_alpha, qprime_pfa, rabin_alpha_pfa, rabin_pfa, unary_pfa_bx,
};
use cutpoints::scalar::{certified_compare, eval, CertifiedOrdering, IrrationalParam, Scalar};
use cutpoints::separation::{
    angle_drift_bounds, qfa_quadrant_witness, scaled_pair_separation, unary_pfa_witness,
    WitnessMode,
};

pub struct CheckOutcome {
    pub name: &'static str,
    pub result: Result<(), String>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn all_words(max_len: usize) -> impl Iterator<Item = String> {
    (0..=max_len).flat_map(|len| {
        (0..(1u64 << len)).map(move |bits| {
            (0..len)
                .map(|i| {
                    if bits >> (len - 1 - i) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
    })
}

pub fn run_all(max_bits: u32, scan_cap: u64) -> Vec<CheckOutcome> {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Result<(), String>>)> = vec![
        (
            "rabin-identity",
            Box::new(|| {
                let p = rabin_pfa();
                for w in all_words(8) {
                    let got = p.accept_prob(&w).map_err(|e| e.to_string())?;
                    let expected = bin_reverse(&w).map_err(|e| e.to_string())?;
                    if got.as_rational() != Some(&expected) {
                        return Err(format!("mismatch at word {w:?}"));
                    }
                }
                Ok(())
            }),
        ),
        (
            "scaling-identity",
            Box::new(|| {
                for (n, d) in [(1i64, 7i64), (2, 5)] {
                    let p = rabin_alpha_pfa(&Scalar::rational(n, d), 256)
                        .map_err(|e| e.to_string())?;
                    for w in all_words(6) {
                        let got = p.accept_prob(&w).map_err(|e| e.to_string())?;
                        let expected = rat(n, d) * bin_reverse(&w).map_err(|e| e.to_string())?;
                        if got.as_rational() != Some(&expected) {
                            return Err(format!("alpha={n}/{d}, word {w:?}"));
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "rotation-closed-form",
            Box::new(|| {
                let q = fixed_rotation_qfa();
                for j in 0..=32u64 {
                    let got = q.accept_prob_unary(j).map_err(|e| e.to_string())?;
                    if got.as_rational() != Some(&fixed_rotation_prob_oracle(j)) {
                        return Err(format!("mismatch at length {j}"));
                    }
                }
                Ok(())
            }),
        ),
        (
            "bx-closed-form",
            Box::new(|| {
                for (n, d) in [(1i64, 4i64), (1, 2)] {
                    let x = Scalar::rational(n, d);
                    let p = unary_pfa_bx(&x, 256).map_err(|e| e.to_string())?;
                    for m in 0..=20u64 {
                        let sim = p.accept_prob_unary(m).map_err(|e| e.to_string())?;
                        let cf = closed_form_prob(&x, m, 256).map_err(|e| e.to_string())?;
                        let diff = &cf - &sim;
                        let enc = eval(&diff, 128).map_err(|e| e.to_string())?;
                        if !enc.contains_zero() {
                            return Err(format!("x={n}/{d}, m={m}"));
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "stochastic-cube",
            Box::new(|| {
                for (n, d) in [(1i64, 16i64), (1, 100), (7, 80), (9, 91), (3, 35)] {
                    qprime_pfa(&Scalar::rational(n, d), 256)
                        .map_err(|e| format!("x={n}/{d}: {e}"))?;
                }
                Ok(())
            }),
        ),
        (
            "interval-claims",
            Box::new(|| {
                let pi = Scalar::pi();
                for (n, d, fixed_range) in [
                    (1i64, 3i64, false),
                    (1, 7, false),
                    (2, 5, false),
                    (1, 16, true),
                    (1, 50, true),
                ] {
                    let x = Scalar::rational(n, d);
                    let c = closed_form_coeffs(&x, 1024).map_err(|e| e.to_string())?;
                    let bounds: Vec<(Scalar, Scalar, Scalar)> = if fixed_range {
                        vec![
                            (
                                c.theta.clone(),
                                &pi * &Scalar::rational(9, 18),
                                &pi * &Scalar::rational(11, 18),
                            ),
                            (
                                c.gamma.clone(),
                                &pi * &Scalar::rational(9, 18),
                                &pi * &Scalar::rational(11, 18),
                            ),
                        ]
                    } else {
                        vec![
                            (
                                c.theta.clone(),
                                &pi * &Scalar::rational(2, 4),
                                &pi * &Scalar::rational(3, 4),
                            ),
                            (
                                c.gamma.clone(),
                                &pi * &Scalar::rational(9, 18),
                                &pi * &Scalar::rational(11, 18),
                            ),
                        ]
                    };
                    for (value, lo, hi) in bounds {
                        let above = certified_compare(&value, &lo, 1024)
                            .map_err(|e| e.to_string())?;
                        let below = certified_compare(&value, &hi, 1024)
                            .map_err(|e| e.to_string())?;
                        if above != CertifiedOrdering::Greater
                            || below != CertifiedOrdering::Less
                        {
                            return Err(format!("interval violated at x={n}/{d}"));
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "drift-bounds",
            Box::new(|| {
                let b = angle_drift_bounds(
                    &Scalar::rational(1, 4),
                    &Scalar::rational(1, 2),
                    WitnessMode::VariableCutpoint,
                    1024,
                )
                .map_err(|e| e.to_string())?;
                if !b.bounds_certified {
                    return Err("variable-mode bounds not certified".into());
                }
                let b = angle_drift_bounds(
                    &Scalar::rational(1, 100),
                    &Scalar::rational(9, 100),
                    WitnessMode::FixedCutpoint,
                    1024,
                )
                .map_err(|e| e.to_string())?;
                if !b.bounds_certified {
                    return Err("fixed-mode bounds not certified".into());
                }
                Ok(())
            }),
        ),
        (
            "scaled-pair-witness",
            Box::new(move || {
                let cert = scaled_pair_separation(
                    &Scalar::rational(1, 4),
                    &Scalar::rational(1, 3),
                    &Scalar::rational(2, 3),
                    max_bits,
                )
                .map_err(|e| e.to_string())?;
                cert.reverify(max_bits).map_err(|e| e.to_string())
            }),
        ),
        (
            "quadrant-witness",
            Box::new(move || {
                let a = IrrationalParam::quadratic(BigRational::from_integer(0.into()), rat(1, 8), 2);
                let b = IrrationalParam::quadratic(BigRational::from_integer(0.into()), rat(1, 8), 3);
                let cert = qfa_quadrant_witness(&a, &b, max_bits).map_err(|e| e.to_string())?;
                cert.reverify(max_bits).map_err(|e| e.to_string())
            }),
        ),
        (
            "unary-witnesses",
            Box::new(move || {
                let cert = unary_pfa_witness(
                    &Scalar::rational(1, 4),
                    &Scalar::rational(1, 2),
                    WitnessMode::VariableCutpoint,
                    scan_cap,
                    max_bits,
                )
                .map_err(|e| e.to_string())?;
                cert.reverify(max_bits).map_err(|e| e.to_string())?;
                let cert = unary_pfa_witness(
                    &Scalar::rational(1, 100),
                    &Scalar::rational(1, 20),
                    WitnessMode::FixedCutpoint,
                    scan_cap,
                    max_bits,
                )
                .map_err(|e| e.to_string())?;
                cert.reverify(max_bits).map_err(|e| e.to_string())
            }),
        ),
        (
            "boundary-honesty",
            Box::new(|| {
                let acc = CutpointAcceptor::new(rabin_pfa(), Scalar::rational(1, 2), 256)
                    .map_err(|e| e.to_string())?;
                match acc.member("1", 256) {
                    Err(cutpoints::automata::AutomataError::Kernel(k)) if k.is_exact_tie() => {
                        Ok(())
                    }
                    Ok(v) => Err(format!("boundary produced a verdict: {v}")),
                    Err(e) => Err(format!("unexpected error kind: {e}")),
                }
            }),
        ),
        (
            "qprime-alpha-halves-cutpoint",
            Box::new(|| {
                for (n, d) in [(1i64, 16i64), (1, 64), (3, 100)] {
                    let x = Scalar::rational(n, d);
                    let alpha = qprime_alpha(&x);
                    let c = &alpha / &(&(&Scalar::integer(3) * &x) + &Scalar::one());
                    if c.as_rational() != Some(&rat(1, 2)) {
                        return Err(format!("constant term not 1/2 at x={n}/{d}"));
                    }
                }
                Ok(())
            }),
        ),
    ];

    checks
        .into_iter()
        .map(|(name, f)| CheckOutcome { name, result: f() })
        .collect()
}
