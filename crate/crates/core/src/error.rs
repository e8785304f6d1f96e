use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular to working precision (pivot column {pivot})")]
    Singular { pivot: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("design columns are collinear: {column} is a linear combination of {earlier}")]
    Collinear { column: String, earlier: String },

    #[error("need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("trajectory exploded at step {step} (t = {time})")]
    Explosion { step: usize, time: f64 },

    #[error("state left the positive orthant at t = {time}")]
    LeftOrthant { time: f64 },

    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short code printed in front of CLI error messages.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "E-DIM",
            Error::InvalidInput(_) => "E-INPUT",
            Error::Singular { .. } => "E-SINGULAR",
            Error::Asymmetric { .. } => "E-ASYM",
            Error::Solver(_) => "E-SOLVER",
            Error::Collinear { .. } => "E-COLLINEAR",
            Error::InsufficientData { .. } => "E-DATA",
            Error::Explosion { .. } => "E-EXPLOSION",
            Error::LeftOrthant { .. } => "E-ORTHANT",
            Error::Parse { .. } => "E-PARSE",
            Error::Io { .. } => "E-IO",
            Error::Json(_) => "E-JSON",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
