use thiserror::Error;

/// Failures of certified evaluation and comparison.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelError {
    /// An arccos argument's enclosure escapes `[-1, 1]` and refinement
    /// cannot pull it back in, or a square root argument stays negative.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A denominator enclosure still contains zero at the maximal internal
    /// budget (or is exactly zero).
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// A sign or comparison query could not be decided. `exact_tie` is set
    /// when the two sides were proven exactly equal, which can never be
    /// resolved by more precision.
    #[error("{}", precision_exhausted_message(*.max_bits, *.exact_tie))]
    PrecisionExhausted { max_bits: u32, exact_tie: bool },

    /// A digit of a binary expansion could not be produced within budget.
    #[error("digit budget exhausted at index {index}")]
    DigitBudgetExhausted { index: u64 },

    /// Parameter failed a certified range precondition.
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

fn precision_exhausted_message(max_bits: u32, exact_tie: bool) -> String {
    if exact_tie {
        format!("values are exactly equal (tie surfaced at max_bits = {max_bits})")
    } else {
        format!("enclosure still straddles the decision boundary at {max_bits} bits")
    }
}

impl KernelError {
    /// True for ties that no precision budget can break.
    pub fn is_exact_tie(&self) -> bool {
        matches!(
            self,
            KernelError::PrecisionExhausted {
                exact_tie: true,
                ..
            }
        )
    }
}
