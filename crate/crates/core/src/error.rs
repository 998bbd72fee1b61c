use thiserror::Error;

use crate::ratcover::CoverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set mismatch")]
    GroundMismatch,

    #[error("invalid ground set: {0}")]
    InvalidGround(String),

    #[error("relation is not reflexive (point {0} is missing from its own image)")]
    NotReflexive(usize),

    #[error("not a quasi-uniformity base: the intersection of the base is not transitive")]
    NotQuasiUniformityBase,

    #[error("{what} too large: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("not a normal sequence: {0}")]
    NotNormalSequence(String),

    #[error("quadruple condition violated: level {0} to the fourth power escapes level {1}")]
    QuadrupleViolated(usize, usize),

    #[error("invalid quasi-pseudometric: {0}")]
    InvalidMetric(String),

    #[error("expected a nonempty set")]
    EmptySet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Cover(#[from] CoverError),
}
