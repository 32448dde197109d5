//! Mutual-information waveform design for statistical MIMO radar and the
//! effect of target spatial correlation on it.
//!
//! - [`numlin`]: dense complex matrices, Hermitian eigendecomposition, log-det.
//! - [`majorize`]: spectra, the majorization order and Schur-convexity checks.
//! - [`channel`]: scatterer-based channel model and target covariance.
//! - [`waveform`]: MI, water-filling and the optimal waveform.
//! - [`experiments`]: parameter sweeps, reports and the CLI.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod majorize;
pub mod numlin;
pub mod waveform;

pub use error::{Error, Result};
pub use majorize::Spectrum;
pub use numlin::{ComplexMatrix, HermitianMatrix};
