use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("positivity violated in {what}: value {value:e} (need > 0)")]
    Positivity { what: &'static str, value: f64 },

    #[error(
        "fixed-point iteration diverged for background amplitude {amplitude}: \
         contraction factor {factor:.3e} after {iterations} iterations"
    )]
    Divergence {
        amplitude: f64,
        factor: f64,
        iterations: usize,
    },

    #[error("background too large: ||n_b - 1||_H2 = {norm:.4e} exceeds {limit}")]
    NotSmall { norm: f64, limit: f64 },

    #[error("time step {dt:.4e} exceeds the CFL bound {limit:.4e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("non-finite value detected at t = {t}")]
    NonFinite { t: f64 },

    #[error("inadmissible energy weights: {0}")]
    InadmissibleWeights(String),

    #[error("incompatible initial data: {0}")]
    Incompatible(String),

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("malformed {what}: {msg}")]
    Format { what: &'static str, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
