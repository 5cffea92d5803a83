use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    Config(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("division by exact zero")]
    ZeroDivision,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("matrix is not invertible over the base ring")]
    NotInvertible,
    #[error("point lies on the boundary K_inf (no odd half-integral part)")]
    PointOnBoundary,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("randomness budget exhausted after {0} attempts")]
    RandomnessExhausted(usize),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
