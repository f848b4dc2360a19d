use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("rank deficient: detected rank {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("parse error at record {record}: {message}")]
    Parse { record: usize, message: String },

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("gradient descent oracle diverged at step {step}")]
    OracleDiverged { step: usize },

    #[error("morphism violates its {kind} constraint (residual {residual:e})")]
    ConstraintViolated { kind: &'static str, residual: f64 },

    #[error("sampler gave up after {attempts} attempts: {reason}")]
    SamplerExhausted { attempts: usize, reason: String },

    #[error("invalid configuration field `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
