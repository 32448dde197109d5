//! The two simulation sweeps, the threshold report and the CLI around them.

pub mod cli;
pub mod config;
pub mod report;
pub mod sweeps;
pub mod table;

pub use cli::cli_main;
pub use config::{CorrelationSweepConfig, FrequencySweepConfig, NoiseSpec};
pub use report::{decorrelation_table, schur_report};
pub use sweeps::{sweep_correlation, sweep_snr_frequency, total_power};
pub use table::{Cell, SweepTable};
