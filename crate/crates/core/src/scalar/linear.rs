//! Decomposition of expressions into rational linear combinations of
//! irrational atoms.
//!
//! This is a certification device, not a simplifier: it walks additions,
//! subtractions and rational scalings, treating everything else as an opaque
//! atom. When all atom coefficients cancel, the expression is proven exactly
//! rational, which is how symbolic column sums like
//! `(1 - a/2) + a/2 = 1` are certified without numeric evaluation.

use num_rational::BigRational;
use num_traits::Zero;

use super::expr::{Expr, Scalar};

pub struct LinearForm {
    constant: BigRational,
    atoms: Vec<(Scalar, BigRational)>,
}

impl LinearForm {
    /// The exact rational value, when no irrational atom survives.
    pub fn as_exact_rational(&self) -> Option<&BigRational> {
        if self.atoms.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }
}

/// Decompose `expr` as `constant + sum(coeff_i * atom_i)` with rational
/// coefficients and structurally-distinct irrational atoms.
pub fn linear_form(expr: &Scalar) -> LinearForm {
    let mut form = LinearForm {
        constant: BigRational::zero(),
        atoms: Vec::new(),
    };
    decompose(expr, &BigRational::from_integer(1.into()), &mut form);
    form.atoms.retain(|(_, c)| !c.is_zero());
    form
}

fn decompose(expr: &Scalar, factor: &BigRational, acc: &mut LinearForm) {
    match &*expr.0 {
        Expr::Rational(r) => acc.constant += factor * r,
        Expr::Add(a, b) => {
            decompose(a, factor, acc);
            decompose(b, factor, acc);
        }
        Expr::Sub(a, b) => {
            decompose(a, factor, acc);
            decompose(b, &-factor.clone(), acc);
        }
        Expr::Mul(a, b) => {
            if let Some(r) = a.as_rational() {
                decompose(b, &(factor * r), acc);
            } else if let Some(r) = b.as_rational() {
                decompose(a, &(factor * r), acc);
            } else {
                push_atom(expr, factor, acc);
            }
        }
        Expr::Div(a, b) => {
            match b.as_rational() {
                Some(r) if !r.is_zero() => decompose(a, &(factor / r), acc),
                _ => push_atom(expr, factor, acc),
            }
        }
        _ => push_atom(expr, factor, acc),
    }
}

fn push_atom(expr: &Scalar, factor: &BigRational, acc: &mut LinearForm) {
    for (atom, coeff) in acc.atoms.iter_mut() {
        if atom.structurally_equal(expr) {
            *coeff += factor;
            return;
        }
    }
    acc.atoms.push((expr.clone(), factor.clone()));
}
