//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range 1..=12")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("kernel evaluated at a singular point (|x| = {0:.3e})")]
    SingularEvaluation(f64),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("evaluation point too close to the surface: dist {dist:.3e} < 0.1 x panel size {panel:.3e}")]
    NearSingular { dist: f64, panel: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
