use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("band {band} too large for grid (limit {limit})")]
    Resolution { band: usize, limit: usize },

    #[error("solvability: sphere mean {mean:e} exceeds tolerance {tol:e}")]
    Solvability { mean: f64, tol: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("finite-difference stencil leaves the domain at {0:?}")]
    Stencil(Vec<f64>),

    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
