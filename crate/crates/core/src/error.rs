use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient weights: weight {index} is not available")]
    InsufficientWeights { index: usize },

    #[error("insufficient moments: moment {index} is not available")]
    InsufficientMoments { index: usize },

    #[error("invalid weight at index {index}: {reason}")]
    InvalidWeight { index: usize, reason: String },

    #[error("invalid moment sequence: {0}")]
    InvalidMoments(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation needs the symbolic density family (nonnegative integer
    /// log powers); callers may fall back to numeric moments.
    #[error("outside symbolic family: {0}")]
    OutsideFamily(String),

    /// A mathematical negative: the requested square root does not exist.
    #[error("no square root: {0}")]
    NoRoot(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("unknown catalog entry '{0}'")]
    UnknownCatalogEntry(String),

    #[error("unsupported density: {0}")]
    UnsupportedDensity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    SelfCheck(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
