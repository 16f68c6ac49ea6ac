use thiserror::Error;

use crate::game::Restriction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("notion `{notion}` is not supported for {players}-player games")]
    UnsupportedNotion { notion: String, players: usize },

    #[error("operator `{operator}` is not contracting at stage {stage}")]
    NonContractingStep { operator: String, stage: usize },

    #[error("iteration budget of {budget} stages exceeded without stabilizing")]
    IterationBudgetExceeded { budget: usize },

    #[error("lattice of 2^{log2_size} restrictions exceeds enumeration budget 2^{log2_budget}")]
    BudgetExceeded {
        log2_size: usize,
        log2_budget: usize,
    },

    #[error("opponent set is empty")]
    EmptyOpponentSet,

    #[error("dominator support is empty")]
    EmptySupport,

    #[error("state space would be empty")]
    EmptyStateSpace,

    #[error("premise violated ({premise}) at restriction {witness:?}")]
    PremiseViolated {
        premise: String,
        witness: Restriction,
    },

    #[error("profile is not monotonic: {0}")]
    NonMonotonicProfile(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
