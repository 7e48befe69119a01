use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("elements belong to different presentations")]
    PresentationMismatch,

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quotient has torsion (invariant factors {0:?})")]
    TorsionQuotient(Vec<String>),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("unknown group spec `{0}`")]
    UnknownSpec(String),

    #[error("subgroup has infinite index")]
    InfiniteIndex,

    #[error("element is not in the subgroup")]
    NotInSubgroup,

    #[error("map is not a homomorphism: {0}")]
    RelationViolation(String),

    #[error("map is not injective: {0}")]
    NotInjective(String),

    #[error("map does not preserve the weight filtration: {0}")]
    NotGraded(String),

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
