use thiserror::Error;

use crate::groupfn::GroupElement;
use crate::multiindex::MultiIndex;
use crate::poly::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("no value assigned to variable {0}")]
    MissingVariable(Var),

    #[error("point {0} lies outside the tabulated box")]
    OutOfDomain(GroupElement),

    #[error("index {index} exceeds truncation bound {bound}")]
    BeyondTruncation { index: MultiIndex, bound: u32 },

    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("missing additive function for index {0}")]
    MissingAdditive(MultiIndex),

    #[error("missing member for index {0}")]
    MissingMember(MultiIndex),

    /// Raised when an exact computation that must produce integers does not.
    /// Signals a bug, never bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("not a moment sequence at {alpha}: {reason}")]
    NotMomentSequence {
        alpha: MultiIndex,
        reason: String,
        witness: Vec<GroupElement>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
