//! Vectors and square matrices over symbolic scalars.
//!
//! Entries stay symbolic; evaluation is deferred to comparison time, so
//! exact rational families use the same code path as irrational ones.
//! Stochasticity and unitarity are *certified* predicates: they answer
//! `true`/`false` only when the answer is proven, and surface
//! `PrecisionExhausted` otherwise.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{
    certified_compare, certified_sign, eval, linear_form, CertifiedOrdering, Enclosure,
    KernelError, Scalar, Sign,
};
use crate::scalar::Expr;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid state vector: {0}")]
    InvalidVector(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A dense square matrix of symbolic scalars, stored row-major.
#[derive(Clone, Debug)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Matrix, LinalgError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::InvalidMatrix("dimension must be >= 1".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Matrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    /// True when every entry is a rational literal.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.is_rational())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.dim != rhs.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.entry(i, 0) * rhs.entry(0, j);
                for k in 1..n {
                    acc = &acc + &(self.entry(i, k) * rhs.entry(k, j));
                }
                entries.push(acc);
            }
        }
        Ok(Matrix { dim: n, entries })
    }

    /// `self^k` by square-and-multiply; `k = 0` gives the identity.
    pub fn pow(&self, k: u64) -> Matrix {
        let mut result = Matrix::identity(self.dim);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    pub fn mat_vec(&self, v: &StateVector) -> Result<StateVector, LinalgError> {
        if self.dim != v.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        let n = self.dim;
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.entry(i, 0) * v.entry(0);
            for k in 1..n {
                acc = &acc + &(self.entry(i, k) * v.entry(k));
            }
            entries.push(acc);
        }
        Ok(StateVector {
            entries,
            kind: v.kind,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                entries.push(self.entry(i, j).clone());
            }
        }
        Matrix { dim: n, entries }
    }

    /// Exact entry-wise equality (rational entries only).
    pub fn exact_eq(&self, other: &Matrix) -> Option<bool> {
        if self.dim != other.dim || !self.is_exact() || !other.is_exact() {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.as_rational() == b.as_rational()),
        )
    }

    /// Certified column-stochasticity: every entry provably `>= 0` and every
    /// column sum exactly 1 (rational fold or symbolic linear-form
    /// cancellation). Sums that stay symbolic and cannot be proven unequal
    /// to 1 surface as `PrecisionExhausted`.
    pub fn is_column_stochastic(&self, max_bits: u32) -> Result<bool, KernelError> {
        for e in &self.entries {
            match entry_certified_nonnegative(e, max_bits)? {
                true => {}
                false => return Ok(false),
            }
        }
        for j in 0..self.dim {
            let mut sum = self.entry(0, j).clone();
            for i in 1..self.dim {
                sum = &sum + self.entry(i, j);
            }
            match scalar_exactly_equals(&sum, &BigRational::one(), max_bits)? {
                true => {}
                false => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Certified unitarity (real orthogonality): `m^T m = I` entry-wise.
    /// Exact matrices are checked exactly; the rotation pattern
    /// `[[cos t, -sin t], [sin t, cos t]]` over a shared angle is recognized
    /// structurally.
    pub fn is_unitary(&self, max_bits: u32) -> Result<bool, KernelError> {
        if self.is_exact() {
            let product = self
                .transpose()
                .mul(self)
                .expect("same dimension");
            return Ok(product
                .exact_eq(&Matrix::identity(self.dim))
                .expect("exact product"));
        }
        if self.is_rotation_pattern() {
            return Ok(true);
        }
        // Certified fallback: try to decide each product entry.
        let product = self.transpose().mul(self).expect("same dimension");
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                match scalar_exactly_equals(product.entry(i, j), &target, max_bits)? {
                    true => {}
                    false => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// `[[cos t, -sin t], [sin t, cos t]]` with all four trig nodes sharing
    /// one angle subtree. Such a matrix is unitary by the Pythagorean
    /// identity, which interval arithmetic alone cannot certify.
    fn is_rotation_pattern(&self) -> bool {
        if self.dim != 2 {
            return false;
        }
        let angle_of_cos = |s: &Scalar| match &*s.0 {
            Expr::Cos(t) => Some(t.clone()),
            _ => None,
        };
        let angle_of_sin = |s: &Scalar| match &*s.0 {
            Expr::Sin(t) => Some(t.clone()),
            _ => None,
        };
        let angle_of_neg_sin = |s: &Scalar| match &*s.0 {
            Expr::Sub(z, inner) => {
                if z.as_rational().map(|r| r.is_zero()) == Some(true) {
                    angle_of_sin(inner)
                } else {
                    None
                }
            }
            _ => None,
        };
        let (Some(t00), Some(t01), Some(t10), Some(t11)) = (
            angle_of_cos(self.entry(0, 0)),
            angle_of_neg_sin(self.entry(0, 1)),
            angle_of_sin(self.entry(1, 0)),
            angle_of_cos(self.entry(1, 1)),
        ) else {
            return false;
        };
        t00.structurally_equal(&t01)
            && t00.structurally_equal(&t10)
            && t00.structurally_equal(&t11)
    }
}

fn entry_certified_nonnegative(e: &Scalar, max_bits: u32) -> Result<bool, KernelError> {
    if let Some(r) = e.as_rational() {
        return Ok(!r.is_negative());
    }
    match certified_sign(e, max_bits) {
        Ok(Sign::Positive) => Ok(true),
        Ok(Sign::Negative) => Ok(false),
        // An exact tie means the entry is exactly zero, which is fine.
        Err(err) if err.is_exact_tie() => Ok(true),
        Err(err) => Err(err),
    }
}

/// Does `s` equal `target` exactly? Uses rational folding and linear-form
/// cancellation for the positive answer, certified comparison for the
/// negative one.
fn scalar_exactly_equals(
    s: &Scalar,
    target: &BigRational,
    max_bits: u32,
) -> Result<bool, KernelError> {
    if let Some(r) = linear_form(s).as_exact_rational() {
        return Ok(r == target);
    }
    let t = Scalar::from_big_rational(target.clone());
    match certified_compare(s, &t, max_bits) {
        Ok(CertifiedOrdering::Less) | Ok(CertifiedOrdering::Greater) => Ok(false),
        Err(err) if err.is_exact_tie() => Ok(true),
        Err(err) => Err(err),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    Probabilistic,
    Quantum,
}

/// A state vector tagged as a probability distribution or a unit amplitude
/// vector.
#[derive(Clone, Debug)]
pub struct StateVector {
    entries: Vec<Scalar>,
    kind: VectorKind,
}

impl StateVector {
    /// Distribution vector: certified entries `>= 0` summing to exactly 1.
    pub fn new_probabilistic(
        entries: Vec<Scalar>,
        max_bits: u32,
    ) -> Result<StateVector, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::InvalidVector("dimension must be >= 1".into()));
        }
        for e in &entries {
            if !entry_certified_nonnegative(e, max_bits)? {
                return Err(LinalgError::InvalidVector(
                    "negative entry in probabilistic state".into(),
                ));
            }
        }
        let sum = sum_of(&entries);
        if !scalar_exactly_equals(&sum, &BigRational::one(), max_bits)? {
            return Err(LinalgError::InvalidVector(
                "probabilistic state does not sum to 1".into(),
            ));
        }
        Ok(StateVector {
            entries,
            kind: VectorKind::Probabilistic,
        })
    }

    /// Unit vector: certified squared entries summing to exactly 1.
    pub fn new_quantum(entries: Vec<Scalar>, max_bits: u32) -> Result<StateVector, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::InvalidVector("dimension must be >= 1".into()));
        }
        let squares: Vec<Scalar> = entries.iter().map(|e| e.square()).collect();
        let sum = sum_of(&squares);
        if !scalar_exactly_equals(&sum, &BigRational::one(), max_bits)? {
            return Err(LinalgError::InvalidVector(
                "quantum state squared entries do not sum to 1".into(),
            ));
        }
        Ok(StateVector {
            entries,
            kind: VectorKind::Quantum,
        })
    }

    /// Basis state `e_i`.
    pub fn basis(dim: usize, index: usize, kind: VectorKind) -> StateVector {
        assert!(index < dim, "basis index out of range");
        let entries = (0..dim)
            .map(|k| if k == index { Scalar::one() } else { Scalar::zero() })
            .collect();
        StateVector { entries, kind }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize) -> &Scalar {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn sum(&self) -> Scalar {
        sum_of(&self.entries)
    }

    pub fn squared_sum(&self) -> Scalar {
        let squares: Vec<Scalar> = self.entries.iter().map(|e| e.square()).collect();
        sum_of(&squares)
    }
}

fn sum_of(entries: &[Scalar]) -> Scalar {
    let mut acc = entries[0].clone();
    for e in &entries[1..] {
        acc = &acc + e;
    }
    acc
}

/// Enclosure of a matrix entry, mostly for reporting.
pub fn entry_enclosure(m: &Matrix, row: usize, col: usize, bits: u32) -> Result<Enclosure, KernelError> {
    eval(m.entry(row, col), bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    fn rabin_a1() -> Matrix {
        Matrix::from_rows(vec![
            vec![rat(1, 2), rat(0, 1)],
            vec![rat(1, 2), rat(1, 1)],
        ])
        .unwrap()
    }

    #[test]
    fn identity_times_basis_vector() {
        let id = Matrix::identity(2);
        let v = StateVector::basis(2, 0, VectorKind::Probabilistic);
        let w = id.mat_vec(&v).unwrap();
        assert_eq!(w.entry(0).as_rational().unwrap(), &BigRational::one());
        assert!(w.entry(1).as_rational().unwrap().is_zero());
    }

    #[test]
    fn rabin_a1_on_initial_state() {
        let v = StateVector::basis(2, 0, VectorKind::Probabilistic);
        let w = rabin_a1().mat_vec(&v).unwrap();
        assert_eq!(
            w.entry(0).as_rational().unwrap(),
            &BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            w.entry(1).as_rational().unwrap(),
            &BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn pow_zero_is_identity() {
        let m = rabin_a1();
        let p = m.pow(0);
        assert_eq!(p.exact_eq(&Matrix::identity(2)), Some(true));
    }

    #[test]
    fn pow_additivity_on_exact_matrices() {
        let m = rabin_a1();
        for (j, k) in [(1u64, 2u64), (3, 4), (5, 3), (7, 9)] {
            let lhs = m.pow(j + k);
            let rhs = m.pow(j).mul(&m.pow(k)).unwrap();
            assert_eq!(lhs.exact_eq(&rhs), Some(true));
        }
    }

    #[test]
    fn stochastic_checks() {
        assert!(rabin_a1().is_column_stochastic(256).unwrap());
        let not_stochastic = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 4), rat(1, 2)],
        ])
        .unwrap();
        assert!(!not_stochastic.is_column_stochastic(256).unwrap());
        let negative = Matrix::from_rows(vec![
            vec![rat(3, 2), rat(0, 1)],
            vec![rat(-1, 2), rat(1, 1)],
        ])
        .unwrap();
        assert!(!negative.is_column_stochastic(256).unwrap());
    }

    #[test]
    fn symbolic_complement_column_is_stochastic() {
        // [[1 - a/2, (1-a)/2], [a/2, (1+a)/2]] with irrational a in (0,1)
        let a = &Scalar::rational(1, 2).sqrt() * &Scalar::rational(1, 1);
        let half_a = &a / &Scalar::integer(2);
        let g = &(&Scalar::one() - &a) / &Scalar::integer(2);
        let m = Matrix::from_rows(vec![
            vec![&Scalar::one() - &half_a, g.clone()],
            vec![half_a.clone(), &Scalar::one() - &g],
        ])
        .unwrap();
        assert!(m.is_column_stochastic(512).unwrap());
    }

    #[test]
    fn unitary_checks() {
        assert!(Matrix::identity(3).is_unitary(128).unwrap());
        let rot = Matrix::from_rows(vec![
            vec![rat(3, 5), rat(-4, 5)],
            vec![rat(4, 5), rat(3, 5)],
        ])
        .unwrap();
        assert!(rot.is_unitary(128).unwrap());
        // Rabin's A_0 is stochastic but not unitary.
        let a0 = Matrix::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(0, 1), rat(1, 2)],
        ])
        .unwrap();
        assert!(!a0.is_unitary(128).unwrap());
    }

    #[test]
    fn symbolic_rotation_pattern_is_unitary() {
        let t = &Scalar::pi() * &Scalar::rational(2, 7);
        let c = t.cos();
        let s = t.sin();
        let m = Matrix::from_rows(vec![
            vec![c.clone(), -&s],
            vec![s.clone(), c.clone()],
        ])
        .unwrap();
        assert!(m.is_unitary(128).unwrap());
    }

    #[test]
    fn quantum_vector_validation_folds_sqrt_squares() {
        let h = Scalar::rational(1, 2).sqrt();
        let v = StateVector::new_quantum(vec![h.clone(), -&h], 128).unwrap();
        assert_eq!(v.kind(), VectorKind::Quantum);
        assert!(StateVector::new_quantum(vec![h.clone(), h.clone()], 128).is_ok());
        assert!(StateVector::new_quantum(vec![Scalar::one(), h], 128).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = Matrix::identity(2);
        let v = StateVector::basis(3, 0, VectorKind::Probabilistic);
        assert!(matches!(
            m.mat_vec(&v),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }
}
