use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Index or length outside the valid range of a series/window.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// Invalid configuration value or flag combination.
    #[error("config error: {0}")]
    Config(String),

    /// Operands with incompatible shapes.
    #[error("shape error: {0}")]
    Shape(String),

    /// Malformed input data (CSV cell, header, ...).
    #[error("parse error: {0}")]
    Parse(String),

    /// Fewer than two extrema: no envelope can be fitted.
    #[error("degenerate envelope: {0}")]
    DegenerateEnvelope(String),

    /// A decomposition was requested that was never precomputed.
    #[error("cache miss for series {series_id} offset {offset}: run precompute over the training windows first")]
    CacheMiss { series_id: u64, offset: usize },

    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 2 for usage/config problems, 3 for runtime numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bounds(_)
            | Error::Config(_)
            | Error::Shape(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::DegenerateEnvelope(_) | Error::CacheMiss { .. } | Error::Diverged { .. } => 3,
        }
    }
}
