//! Simulation, oracles and witness certification for probabilistic and
//! measure-once quantum finite automata with cutpoint languages.
//!
//! The crate is organized bottom-up:
//! - [`scalar`]: exact rationals, certified interval enclosures and
//!   sign/ordering decisions for the transcendental-valued quantities the
//!   constructions need;
//! - [`linalg`]: vectors and square matrices over symbolic scalars with
//!   stochasticity/unitarity certification and fast exponentiation;
//! - [`automata`]: executable PFA / measure-once QFA semantics and strict
//!   cutpoint membership;
//! - [`constructions`]: the concrete automaton families (Rabin's two-state
//!   PFA and its scaled variant, unary rotation QFAs, the three-state unary
//!   PFAs and their fixed-cutpoint cube) together with closed-form
//!   acceptance-probability oracles;
//! - [`separation`]: constructive witness finders that certify two automata
//!   recognize different languages at a given cutpoint.

pub mod automata;
pub mod constructions;
pub mod linalg;
pub mod scalar;
pub mod separation;

pub use scalar::{Enclosure, KernelError, Scalar};
