//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("family {family:?} short by {missing} sequence(s) for the requested split")]
    FamilyShort { family: String, missing: usize },

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("component {index} is {value}, outside [0, 1]")]
    ComponentOutOfRange { index: usize, value: f64 },

    #[error("label {0:?} is not in the class list")]
    UnknownLabel(String),

    #[error("model has no categories; train before predicting")]
    UntrainedModel,

    #[error("candidate pool has {len} entries, need at least {min}")]
    PoolTooSmall { len: usize, min: usize },

    #[error("{combinations} subsets exceed the exhaustive search budget of {budget}; use the genetic search instead")]
    PoolTooLarge { combinations: u64, budget: u64 },

    #[error("invalid chromosome: {0}")]
    InvalidChromosome(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model bundle version {found} is not supported (expected {supported})")]
    BundleVersion { found: u32, supported: u32 },

    #[error("invalid model bundle: {0}")]
    InvalidModel(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an io error with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
