use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid delay profile: {0}")]
    InvalidDelays(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    #[error("trellis has {states} states, above the cap of {cap}")]
    StateSpace { states: usize, cap: usize },

    #[error("matrix is singular or numerically rank deficient")]
    Singular,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("hypergeometric series did not converge after {terms} terms (partial value {partial})")]
    NoConvergence { terms: usize, partial: f64 },

    #[error("root isolation failed: {message} (bracketed roots: {roots:?})")]
    RootIsolation { message: String, roots: Vec<f64> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
