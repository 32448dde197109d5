use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("singular matrix: eigenvalue {value:e} at index {index} is not positive")]
    Singular { index: usize, value: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("traces differ: {left} vs {right}; the correlation order is undefined")]
    TraceMismatch { left: f64, right: f64 },

    #[error("no usable eigenmode: every target eigenvalue is zero")]
    NoUsableEigenmode,

    #[error("function returned non-finite value {value} at input {input:?}")]
    NonFiniteObjective { value: f64, input: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Process exit code: 2 for configuration and usage problems, 1 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Io { .. }
            | Error::Json { .. }
            | Error::InvalidSpectrum(_)
            | Error::LengthMismatch { .. }
            | Error::TraceMismatch { .. }
            | Error::Dimension(_) => 2,
            _ => 1,
        }
    }
}
