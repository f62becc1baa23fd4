//! Property tests for the kernel invariants and the algebraic identities
//! the automata semantics rely on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use cutpoints::constructions::{fixed_rotation_qfa, rabin_pfa, rotation_qfa};
use cutpoints::linalg::{Matrix, StateVector, VectorKind};
use cutpoints::scalar::{
    certified_sign, eval, IrrationalParam, KernelError, Scalar, Sign,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

// ---- random expression trees ----

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    let leaf = prop_oneof![
        (-50i64..=50, 1i64..=20).prop_map(|(n, d)| Scalar::rational(n, d)),
        Just(Scalar::pi()),
        (2u32..=50).prop_map(|d| Scalar::integer(d as i64).sqrt()),
        (-100i64..=100).prop_map(|n| Scalar::rational(n, 100).arccos()),
    ];
    leaf.prop_recursive(3, 20, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), 2i64..=9).prop_map(|(a, d)| &a / &Scalar::integer(d)),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.abs()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Enclosure nesting: evaluation at 2p bits is contained in the p-bit
    /// enclosure, and both contain a common value.
    #[test]
    fn enclosure_nesting(expr in arb_scalar(), p in prop_oneof![Just(32u32), Just(48), Just(64), Just(100)]) {
        let coarse = eval(&expr, p).unwrap();
        let fine = eval(&expr, 2 * p).unwrap();
        prop_assert!(
            coarse.contains_enclosure(&fine),
            "nesting violated for {expr} at {p} bits: [{}, {}] vs [{}, {}]",
            coarse.lower(), coarse.upper(), fine.lower(), fine.upper()
        );
    }

    /// Width contract: at p bits the width is at most 2^(1-p) * max(1, |v|).
    #[test]
    fn enclosure_width_contract(expr in arb_scalar(), p in prop_oneof![Just(32u32), Just(64), Just(128)]) {
        let enc = eval(&expr, p).unwrap();
        let mut scale = enc.magnitude_upper_bound();
        if scale < BigRational::one() {
            scale = BigRational::one();
        }
        let bound = BigRational::new(BigInt::from(2), BigInt::one() << p as usize) * scale;
        prop_assert!(enc.width() <= bound, "width too large for {expr} at {p} bits");
    }
}

// ---- exactness of the rational path ----

#[derive(Debug, Clone)]
enum RatOp {
    Add(i64, i64),
    Sub(i64, i64),
    Mul(i64, i64),
    Div(i64, i64),
}

fn arb_rat_ops() -> impl Strategy<Value = Vec<RatOp>> {
    prop::collection::vec(
        prop_oneof![
            (-9i64..=9, 1i64..=9).prop_map(|(n, d)| RatOp::Add(n, d)),
            (-9i64..=9, 1i64..=9).prop_map(|(n, d)| RatOp::Sub(n, d)),
            (-9i64..=9, 1i64..=9).prop_map(|(n, d)| RatOp::Mul(n, d)),
            (1i64..=9, 1i64..=9).prop_map(|(n, d)| RatOp::Div(n, d)),
        ],
        1..12,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Any expression built only from rationals evaluates to a zero-width
    /// enclosure equal to exact rational arithmetic.
    #[test]
    fn rational_expressions_evaluate_exactly(ops in arb_rat_ops(), p in 1u32..512) {
        let mut expr = Scalar::rational(1, 3);
        let mut expected = rat(1, 3);
        for op in &ops {
            match *op {
                RatOp::Add(n, d) => { expr = &expr + &Scalar::rational(n, d); expected += rat(n, d); }
                RatOp::Sub(n, d) => { expr = &expr - &Scalar::rational(n, d); expected -= rat(n, d); }
                RatOp::Mul(n, d) => { expr = &expr * &Scalar::rational(n, d); expected *= rat(n, d); }
                RatOp::Div(n, d) => { expr = &expr / &Scalar::rational(n, d); expected /= rat(n, d); }
            }
        }
        let enc = eval(&expr, p).unwrap();
        prop_assert!(enc.is_exact());
        prop_assert_eq!(enc.lower(), &expected);
    }

    /// certified_sign matches the exact rational sign on rational inputs.
    #[test]
    fn certified_sign_matches_rational_sign(n in -400i64..=400, d in 1i64..=40) {
        let expr = Scalar::rational(n, d);
        match certified_sign(&expr, 64) {
            Ok(Sign::Positive) => prop_assert!(n > 0),
            Ok(Sign::Negative) => prop_assert!(n < 0),
            Err(e) => {
                prop_assert!(n == 0);
                prop_assert!(e.is_exact_tie());
            }
        }
    }
}

// ---- digit/value consistency ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Partial digit sums bracket the value: sum <= v < sum + 2^-n.
    #[test]
    fn digits_bracket_the_value(n in 1i64..=999, digits in 1u64..=24) {
        let value = rat(n, 1000);
        let param = IrrationalParam::Rational(value.clone());
        let expansion = param.binary_digits(digits, 4096).unwrap();
        let mut sum = BigRational::zero();
        for (k, &bit) in expansion.bits.iter().enumerate() {
            if bit {
                sum += BigRational::new(BigInt::one(), BigInt::one() << (k + 1));
            }
        }
        let step = BigRational::new(BigInt::one(), BigInt::one() << digits as usize);
        prop_assert!(sum <= value);
        prop_assert!(value < &sum + &step);
    }

    #[test]
    fn quadratic_digits_bracket_the_value(d in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)], digits in 1u64..=20) {
        // sqrt(d)/16 lies in (0, 1) for d <= 7 and is certified irrational.
        let param = IrrationalParam::quadratic(BigRational::zero(), rat(1, 16), d);
        let expansion = param.binary_digits(digits, 4096).unwrap();
        let mut sum = BigRational::zero();
        for (k, &bit) in expansion.bits.iter().enumerate() {
            if bit {
                sum += BigRational::new(BigInt::one(), BigInt::one() << (k + 1));
            }
        }
        // Compare certified: sum <= v < sum + 2^-n via the enclosure.
        let enc = eval(&param.to_scalar(), digits as u32 + 64).unwrap();
        let step = BigRational::new(BigInt::one(), BigInt::one() << digits as usize);
        prop_assert!(&sum <= enc.upper());
        prop_assert!(enc.lower() < &(&sum + &step));
    }
}

// ---- linear algebra identities ----

fn arb_column_stochastic(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(1u32..=6, dim), dim).prop_map(move |cols| {
        // Normalize each column of positive weights to sum to 1 exactly.
        let mut rows = vec![vec![Scalar::zero(); dim]; dim];
        for (j, col) in cols.iter().enumerate() {
            let total: u32 = col.iter().sum();
            for (i, &w) in col.iter().enumerate() {
                rows[i][j] = Scalar::rational(w as i64, total as i64);
            }
        }
        Matrix::from_rows(rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// mat_pow(m, j + k) = mat_pow(m, j) * mat_pow(m, k) on exact matrices.
    #[test]
    fn matrix_power_additivity(m in arb_column_stochastic(3), j in 0u64..=8, k in 0u64..=8) {
        let lhs = m.pow(j + k);
        let rhs = m.pow(j).mul(&m.pow(k)).unwrap();
        prop_assert_eq!(lhs.exact_eq(&rhs), Some(true));
    }

    /// Products of column-stochastic matrices stay column-stochastic.
    #[test]
    fn stochastic_closure(a in arb_column_stochastic(3), b in arb_column_stochastic(3)) {
        prop_assert!(a.mul(&b).unwrap().is_column_stochastic(256).unwrap());
    }
}

#[test]
fn stochastic_closure_on_rabin_words() {
    // Every word up to length 8 over Rabin's matrices yields a stochastic
    // product.
    let p = rabin_pfa();
    let a0 = p.matrix_for('0').unwrap().clone();
    let a1 = p.matrix_for('1').unwrap().clone();
    for len in 1..=8usize {
        for bits in 0..(1u32 << len) {
            let mut m = Matrix::identity(2);
            for i in 0..len {
                let step = if bits >> i & 1 == 1 { &a1 } else { &a0 };
                m = step.mul(&m).unwrap();
            }
            assert!(m.is_column_stochastic(256).unwrap());
        }
    }
}

#[test]
fn unitary_norm_preservation_exact() {
    let q = fixed_rotation_qfa();
    let r = q.matrix_for('0').unwrap();
    let mut v = StateVector::basis(2, 0, VectorKind::Quantum);
    for _ in 0..64 {
        v = r.mat_vec(&v).unwrap();
        assert_eq!(v.squared_sum().as_rational(), Some(&BigRational::one()));
    }
}

#[test]
fn unitary_norm_preservation_symbolic() {
    let alpha = IrrationalParam::quadratic(BigRational::zero(), rat(1, 8), 2);
    let q = rotation_qfa(&alpha, 512).unwrap();
    let r = q.matrix_for('0').unwrap();
    let mut v = StateVector::basis(2, 0, VectorKind::Quantum);
    for step in 1..=6 {
        v = r.mat_vec(&v).unwrap();
        let norm = v.squared_sum();
        let enc = eval(&norm, 128).unwrap();
        assert!(
            enc.contains(&BigRational::one()),
            "norm enclosure lost 1 after {step} steps"
        );
        assert!(enc.width() < rat(1, 1 << 30) * rat(1, 1 << 30));
    }
}

#[test]
fn pfa_probabilities_stay_in_unit_interval() {
    // For the paper's PFA families and short words, probabilities are in
    // [0, 1] and the final distribution sums to 1 exactly.
    use cutpoints::constructions::{rabin_alpha_pfa, unary_pfa_bx};
    let automata = vec![
        rabin_pfa(),
        rabin_alpha_pfa(&Scalar::rational(2, 5), 256).unwrap(),
    ];
    for p in &automata {
        for len in 0..=8usize {
            for bits in 0..(1u32 << len) {
                let w: String = (0..len)
                    .map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
                    .collect();
                let prob = p.accept_prob(&w).unwrap();
                let r = prob.as_rational().unwrap();
                assert!(!r.is_negative() && r <= &BigRational::one());
            }
        }
    }
    let bx = unary_pfa_bx(&Scalar::rational(1, 4), 256).unwrap();
    for m in 0..=32u64 {
        let prob = bx.accept_prob_unary(m).unwrap();
        let r = prob.as_rational().unwrap();
        assert!(!r.is_negative() && r <= &BigRational::one());
    }
}

#[test]
fn division_by_zero_is_explicit() {
    let z = &Scalar::pi() - &Scalar::pi();
    let e = &Scalar::one() / &z;
    match eval(&e, 64) {
        Err(KernelError::DivisionByZero(_)) => {}
        other => panic!("expected DivisionByZero, got {other:?}"),
    }
}
