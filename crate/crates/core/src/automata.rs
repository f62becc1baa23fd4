//! Executable semantics for PFAs and measure-once QFAs, plus strict
//! cutpoint-language membership.
//!
//! Words are read left to right; the matrix of the leftmost symbol is
//! applied first. The empty string leaves the automaton in its initial
//! state. There is no pre- or post-processing symbol.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix, StateVector, VectorKind};
use crate::scalar::{
    certified_compare, certify_in_range, Bound, CertifiedOrdering, KernelError, Scalar,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AutomataError {
    #[error("symbol {symbol:?} not in alphabet")]
    SymbolNotInAlphabet { symbol: char },
    #[error("matrix for symbol {symbol:?} is not column-stochastic")]
    NotStochastic { symbol: char },
    #[error("matrix for symbol {symbol:?} is not unitary")]
    NotUnitary { symbol: char },
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("cutpoint not certifiably in [0, 1)")]
    CutpointOutOfRange,
    #[error("unary input given to a non-unary automaton")]
    NotUnary,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn check_structure(
    alphabet: &[char],
    matrices: &[Matrix],
    initial: usize,
    accepting: &BTreeSet<usize>,
) -> Result<usize, AutomataError> {
    if alphabet.is_empty() {
        return Err(AutomataError::InvalidAutomaton("empty alphabet".into()));
    }
    let mut seen = BTreeSet::new();
    for &c in alphabet {
        if !seen.insert(c) {
            return Err(AutomataError::InvalidAutomaton(format!(
                "duplicate symbol {c:?}"
            )));
        }
    }
    if matrices.len() != alphabet.len() {
        return Err(AutomataError::InvalidAutomaton(
            "one matrix required per symbol".into(),
        ));
    }
    let dim = matrices[0].dim();
    for m in matrices {
        if m.dim() != dim {
            return Err(AutomataError::InvalidAutomaton(
                "matrices of differing dimension".into(),
            ));
        }
    }
    if initial >= dim {
        return Err(AutomataError::InvalidAutomaton(
            "initial state out of range".into(),
        ));
    }
    if accepting.iter().any(|&s| s >= dim) {
        return Err(AutomataError::InvalidAutomaton(
            "accepting state out of range".into(),
        ));
    }
    Ok(dim)
}

macro_rules! automaton_common {
    ($ty:ident) => {
        impl $ty {
            pub fn state_count(&self) -> usize {
                self.dim
            }

            pub fn alphabet(&self) -> &[char] {
                &self.alphabet
            }

            pub fn initial_state(&self) -> usize {
                self.initial
            }

            pub fn accepting_states(&self) -> &BTreeSet<usize> {
                &self.accepting
            }

            pub fn matrix_for(&self, symbol: char) -> Result<&Matrix, AutomataError> {
                let idx = self
                    .alphabet
                    .iter()
                    .position(|&c| c == symbol)
                    .ok_or(AutomataError::SymbolNotInAlphabet { symbol })?;
                Ok(&self.matrices[idx])
            }

            pub fn is_unary(&self) -> bool {
                self.alphabet.len() == 1
            }

            fn final_state_for(
                &self,
                word: &str,
                kind: VectorKind,
            ) -> Result<StateVector, AutomataError> {
                let chars: Vec<char> = word.chars().collect();
                // Single-symbol words reduce to a matrix power, which keeps
                // long unary inputs cheap via repeated squaring.
                if !chars.is_empty() && chars.iter().all(|&c| c == chars[0]) {
                    let m = self.matrix_for(chars[0])?;
                    let v = StateVector::basis(self.dim, self.initial, kind);
                    return Ok(m.pow(chars.len() as u64).mat_vec(&v)?);
                }
                let mut v = StateVector::basis(self.dim, self.initial, kind);
                for c in chars {
                    v = self.matrix_for(c)?.mat_vec(&v)?;
                }
                Ok(v)
            }

            fn final_state_unary(
                &self,
                len: u64,
                kind: VectorKind,
            ) -> Result<StateVector, AutomataError> {
                if !self.is_unary() {
                    return Err(AutomataError::NotUnary);
                }
                let v = StateVector::basis(self.dim, self.initial, kind);
                Ok(self.matrices[0].pow(len).mat_vec(&v)?)
            }
        }
    };
}

/// A probabilistic finite automaton with certified column-stochastic
/// transition matrices.
#[derive(Clone, Debug)]
pub struct Pfa {
    alphabet: Vec<char>,
    matrices: Vec<Matrix>,
    initial: usize,
    accepting: BTreeSet<usize>,
    dim: usize,
}

automaton_common!(Pfa);

impl Pfa {
    pub fn new(
        alphabet: Vec<char>,
        matrices: Vec<Matrix>,
        initial: usize,
        accepting: BTreeSet<usize>,
        max_bits: u32,
    ) -> Result<Pfa, AutomataError> {
        let dim = check_structure(&alphabet, &matrices, initial, &accepting)?;
        for (m, &c) in matrices.iter().zip(&alphabet) {
            if !m.is_column_stochastic(max_bits)? {
                return Err(AutomataError::NotStochastic { symbol: c });
            }
        }
        Ok(Pfa {
            alphabet,
            matrices,
            initial,
            accepting,
            dim,
        })
    }

    /// Acceptance probability: the sum of accepting entries of the final
    /// probabilistic state. Exact for exact automata.
    pub fn accept_prob(&self, word: &str) -> Result<Scalar, AutomataError> {
        let v = self.final_state_for(word, VectorKind::Probabilistic)?;
        Ok(self.accepting_mass(&v))
    }

    /// Acceptance probability of the unary word `0^len`.
    pub fn accept_prob_unary(&self, len: u64) -> Result<Scalar, AutomataError> {
        let v = self.final_state_unary(len, VectorKind::Probabilistic)?;
        Ok(self.accepting_mass(&v))
    }

    fn accepting_mass(&self, v: &StateVector) -> Scalar {
        let mut acc = Scalar::zero();
        for &s in &self.accepting {
            acc = &acc + v.entry(s);
        }
        acc
    }
}

/// A measure-once quantum finite automaton with certified unitary (real
/// orthogonal) transition matrices.
#[derive(Clone, Debug)]
pub struct Qfa {
    alphabet: Vec<char>,
    matrices: Vec<Matrix>,
    initial: usize,
    accepting: BTreeSet<usize>,
    dim: usize,
}

automaton_common!(Qfa);

impl Qfa {
    pub fn new(
        alphabet: Vec<char>,
        matrices: Vec<Matrix>,
        initial: usize,
        accepting: BTreeSet<usize>,
        max_bits: u32,
    ) -> Result<Qfa, AutomataError> {
        let dim = check_structure(&alphabet, &matrices, initial, &accepting)?;
        for (m, &c) in matrices.iter().zip(&alphabet) {
            if !m.is_unitary(max_bits)? {
                return Err(AutomataError::NotUnitary { symbol: c });
            }
        }
        Ok(Qfa {
            alphabet,
            matrices,
            initial,
            accepting,
            dim,
        })
    }

    /// Acceptance probability: squared magnitudes of accepting amplitudes
    /// after unitary evolution (real amplitudes only).
    pub fn accept_prob(&self, word: &str) -> Result<Scalar, AutomataError> {
        let v = self.final_state_for(word, VectorKind::Quantum)?;
        Ok(self.accepting_mass(&v))
    }

    pub fn accept_prob_unary(&self, len: u64) -> Result<Scalar, AutomataError> {
        let v = self.final_state_unary(len, VectorKind::Quantum)?;
        Ok(self.accepting_mass(&v))
    }

    fn accepting_mass(&self, v: &StateVector) -> Scalar {
        let mut acc = Scalar::zero();
        for &s in &self.accepting {
            acc = &acc + &v.entry(s).square();
        }
        acc
    }
}

/// Either automaton kind, for uniform cutpoint handling.
#[derive(Clone, Debug)]
pub enum Automaton {
    Pfa(Pfa),
    Qfa(Qfa),
}

impl Automaton {
    pub fn accept_prob(&self, word: &str) -> Result<Scalar, AutomataError> {
        match self {
            Automaton::Pfa(p) => p.accept_prob(word),
            Automaton::Qfa(q) => q.accept_prob(word),
        }
    }

    pub fn accept_prob_unary(&self, len: u64) -> Result<Scalar, AutomataError> {
        match self {
            Automaton::Pfa(p) => p.accept_prob_unary(len),
            Automaton::Qfa(q) => q.accept_prob_unary(len),
        }
    }

    pub fn is_unary(&self) -> bool {
        match self {
            Automaton::Pfa(p) => p.is_unary(),
            Automaton::Qfa(q) => q.is_unary(),
        }
    }
}

impl From<Pfa> for Automaton {
    fn from(p: Pfa) -> Self {
        Automaton::Pfa(p)
    }
}

impl From<Qfa> for Automaton {
    fn from(q: Qfa) -> Self {
        Automaton::Qfa(q)
    }
}

/// An automaton paired with a cutpoint in `[0, 1)`; the recognized language
/// is the set of words accepted with probability strictly greater than the
/// cutpoint.
#[derive(Clone, Debug)]
pub struct CutpointAcceptor {
    automaton: Automaton,
    cutpoint: Scalar,
}

impl CutpointAcceptor {
    pub fn new(
        automaton: impl Into<Automaton>,
        cutpoint: Scalar,
        max_bits: u32,
    ) -> Result<CutpointAcceptor, AutomataError> {
        let inside = certify_in_range(
            &cutpoint,
            &Scalar::zero(),
            Bound::Closed,
            &Scalar::one(),
            Bound::Open,
            max_bits,
        )?;
        if !inside {
            return Err(AutomataError::CutpointOutOfRange);
        }
        Ok(CutpointAcceptor {
            automaton: automaton.into(),
            cutpoint,
        })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn cutpoint(&self) -> &Scalar {
        &self.cutpoint
    }

    /// Strict membership. A probability exactly equal to the cutpoint (or an
    /// exhausted budget) is an error, never a verdict.
    pub fn member(&self, word: &str, max_bits: u32) -> Result<bool, AutomataError> {
        let prob = self.automaton.accept_prob(word)?;
        self.decide(&prob, max_bits)
    }

    pub fn member_unary(&self, len: u64, max_bits: u32) -> Result<bool, AutomataError> {
        let prob = self.automaton.accept_prob_unary(len)?;
        self.decide(&prob, max_bits)
    }

    fn decide(&self, prob: &Scalar, max_bits: u32) -> Result<bool, AutomataError> {
        match certified_compare(prob, &self.cutpoint, max_bits)? {
            CertifiedOrdering::Greater => Ok(true),
            CertifiedOrdering::Less => Ok(false),
        }
    }
}
