//! `radar-mi` command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration or usage
//! error. `RADAR_MI_THREADS` caps worker threads (unset or 0 = all cores).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::config::{CorrelationSweepConfig, FrequencySweepConfig, NoiseSpec};
use super::report::{decorrelation_table, schur_report};
use super::sweeps::{sweep_correlation, sweep_snr_frequency};
use super::table::SweepTable;
use crate::error::{Error, Result};
use crate::majorize::Spectrum;
use crate::waveform::LogBase;

pub const THREADS_ENV: &str = "RADAR_MI_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "radar-mi",
    version,
    about = "MI-optimal MIMO radar waveforms and spatial correlation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// MI versus the correlation parameter tau at several SNRs.
    SweepCorrelation {
        /// JSON scenario; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Accepted for interface symmetry; this sweep is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        nats: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// MI versus SNR for each carrier frequency of a geometric scenario.
    SweepFrequency {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Identity noise covariance instead of the configured spectrum.
        #[arg(long)]
        white_noise: bool,
        #[arg(long)]
        nats: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pairwise threshold table for colored-noise Schur-convexity.
    SchurReport {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        sigma_h: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        sigma_w: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spatial de-correlation conditions at each configured frequency.
    DecorrelationCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replaces the configured frequency list (Hz).
        #[arg(long, value_delimiter = ',')]
        frequency: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,1")]
        tx_pair: Vec<usize>,
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,1")]
        rx_pair: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pair(v: &[usize], what: &str) -> Result<(usize, usize)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Config(format!("{what} needs exactly two indices, got {v:?}"))),
    }
}

fn log_base(nats: bool) -> LogBase {
    if nats {
        LogBase::Nats
    } else {
        LogBase::Bits
    }
}

fn run(command: Command) -> Result<(SweepTable, OutputArgs)> {
    Ok(match command {
        Command::SweepCorrelation {
            config,
            seed,
            nats,
            output,
        } => {
            let mut cfg = match &config {
                Some(p) => CorrelationSweepConfig::load(p)?,
                None => CorrelationSweepConfig::default(),
            };
            cfg.log_base = log_base(nats || cfg.log_base == LogBase::Nats);
            let mut table = sweep_correlation(&cfg)?;
            if let Some(s) = seed {
                table.meta("seed", s.to_string());
            }
            (table, output)
        }
        Command::SweepFrequency {
            config,
            seed,
            white_noise,
            nats,
            output,
        } => {
            let mut cfg = match &config {
                Some(p) => FrequencySweepConfig::load(p)?,
                None => FrequencySweepConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if white_noise {
                cfg.noise = NoiseSpec::White;
            }
            cfg.log_base = log_base(nats || cfg.log_base == LogBase::Nats);
            (sweep_snr_frequency(&cfg)?, output)
        }
        Command::SchurReport {
            sigma_h,
            sigma_w,
            output,
        } => {
            let h = Spectrum::new(sigma_h)?;
            let w = Spectrum::new(sigma_w)?;
            (schur_report(&h, &w)?, output)
        }
        Command::DecorrelationCheck {
            config,
            frequency,
            tx_pair,
            rx_pair,
            output,
        } => {
            let mut cfg = match &config {
                Some(p) => FrequencySweepConfig::load(p)?,
                None => FrequencySweepConfig::default(),
            };
            if !frequency.is_empty() {
                cfg.frequencies_hz = frequency;
            }
            let table = decorrelation_table(&cfg, pair(&tx_pair, "--tx-pair")?, pair(&rx_pair, "--rx-pair")?)?;
            (table, output)
        }
    })
}

fn emit(table: &SweepTable, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    match pool
        .install(|| run(cli.command))
        .and_then(|(table, output)| emit(&table, &output, stdout))
    {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
