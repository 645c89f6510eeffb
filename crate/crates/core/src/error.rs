use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system `{0}` appears more than once")]
    SystemClash(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("system `{name}` must have dimension >= 1, got {dim}")]
    ZeroDimension { name: String, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("system order is not a permutation of the operator's systems")]
    NotPermutation,

    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("truncation mass must lie in [0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("purifier dimension {dim} is smaller than the rank {rank} of the state")]
    PurifierTooSmall { rank: usize, dim: usize },

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("channel is not trace non-increasing (max eigenvalue of sum K^dag K is {0})")]
    TraceIncreasing(f64),

    #[error("operator is not a projector onto its output space: {0}")]
    NotProjector(String),

    #[error("weight support does not contain the support of the conditioning marginal (leak {0:e})")]
    SupportMismatch(f64),

    #[error("truncation removed the entire spectrum")]
    EmptySupport,

    #[error("sender `{0}` has dimension 1; the commutant system is singular")]
    DegenerateSender(String),

    #[error("infeasible dimensions: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not implemented")]
    Unimplemented(&'static str),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Whether the error comes from the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EmptySupport | Error::NotPsd { .. } | Error::SupportMismatch(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
