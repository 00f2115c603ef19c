use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} is outside the supported range 2..=16")]
    UnsupportedDimension(usize),

    #[error("coordinate {0} is not finite or exceeds 1e100 in magnitude")]
    CoordinateOutOfRange(f64),

    #[error("invalid point literal {0:?} (expected comma-separated reals or \"inf\")")]
    InvalidPointLiteral(String),

    #[error("degenerate cross-ratio: {0}")]
    DegenerateCrossRatio(&'static str),

    #[error("{function} is undefined at {value}")]
    ArgumentOutOfRange { function: &'static str, value: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// A query point violates the `x ∈ G` precondition. The message names the point.
    #[error("{0}")]
    NotInDomain(String),

    #[error("the domain is not declared as a subset of R^n")]
    NotEuclidean,

    #[error("strategy does not fit the domain: {0}")]
    StrategyMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid exponent {0:?} (expected a positive real or \"inf\")")]
    InvalidExponent(String),

    #[error("configuration generation failed after {0} retries")]
    GenerationFailed(usize),

    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
