use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("float mode requires an explicit tolerance")]
    MissingTolerance,
    #[error("non-finite entries in input")]
    NonFinite,
    #[error("matrix is singular")]
    Singular,
    #[error("rank {found} where {expected} was required")]
    Rank { expected: String, found: usize },
    #[error("all coefficients are zero")]
    ZeroPolynomial,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("value is not representable in this scalar tower: {0}")]
    Unrepresentable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn precondition(msg: impl Into<String>) -> GeomError {
    GeomError::Precondition(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> GeomError {
    GeomError::Degenerate(msg.into())
}
