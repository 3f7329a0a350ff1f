use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root finding did not converge: {0}")]
    Convergence(String),

    #[error("invalid spectral model: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no lattice frequencies fall in the spectral support; the torus side must be at least {min_side:.6}")]
    EmptyFrequencySet { min_side: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config hash mismatch: expected {expected:016x}, found {found:016x}")]
    ConfigHashMismatch { expected: u64, found: u64 },

    #[error("{failed} of {total} realizations failed, above the 10% abort threshold; first: {first}")]
    TooManyFailures { failed: usize, total: usize, first: String },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
