//! JSON scenario documents. Both kinds carry `"schema": 1`.
//!
//! Correlation sweep:
//!
//! ```json
//! {
//!   "schema": 1,
//!   "transmitters": 2, "receivers": 2, "snapshots": 2,
//!   "sigma_w": [8, 4, 3, 2],
//!   "correlated": [1, 0, 0, 0],
//!   "uncorrelated": [0.25, 0.25, 0.25, 0.25],
//!   "tau_grid": [0.0, 0.05, 1.0],
//!   "snr_db": [0, 5, 20]
//! }
//! ```
//!
//! Frequency sweep (also read by `decorrelation-check`):
//!
//! ```json
//! {
//!   "schema": 1,
//!   "geometry": {
//!     "tx_positions": [[2, 4.8], [2.2, 4]],
//!     "rx_positions": [[0, 2], [0, 4]],
//!     "target_center": [2, 2],
//!     "target_dims": [2, 2]
//!   },
//!   "frequencies_hz": [1e8, 8e9],
//!   "scatterers": 1000,
//!   "seed": 1,
//!   "snapshots": 2,
//!   "snr_db": [-10, -8, 30],
//!   "noise": {"colored": [8, 4, 3, 2]}
//! }
//! ```
//!
//! `noise` may also be the string `"white"`. Omitted grids fall back to 21
//! uniform τ points and −10:2:30 dB.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::Scene;
use crate::error::{Error, Result};
use crate::majorize::{Spectrum, ORDER_TOL};
use crate::waveform::LogBase;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TAU_POINTS: usize = 21;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `-10, -8, ..., 30` dB.
pub fn default_snr_grid() -> Vec<f64> {
    (-5..=15).map(|i| 2.0 * i as f64).collect()
}

fn default_tau_grid() -> Vec<f64> {
    uniform_grid(0.0, 1.0, DEFAULT_TAU_POINTS)
}

fn default_colored_noise() -> Spectrum {
    Spectrum::new(vec![8.0, 4.0, 3.0, 2.0]).expect("descending")
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

fn check_snr(snr_db: &[f64]) -> Result<()> {
    if snr_db.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    if snr_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("SNR grid contains a non-finite value".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSweepConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub transmitters: usize,
    pub receivers: usize,
    pub snapshots: usize,
    pub sigma_w: Spectrum,
    /// `τ = 1` endpoint.
    pub correlated: Spectrum,
    /// `τ = 0` endpoint.
    pub uncorrelated: Spectrum,
    #[serde(default = "default_tau_grid")]
    pub tau_grid: Vec<f64>,
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub log_base: LogBase,
}

impl Default for CorrelationSweepConfig {
    /// 2×2 array, two snapshots, noise spectrum `[8, 4, 3, 2]`, endpoints
    /// `[1, 0, 0, 0]` and the flat spectrum, SNR 0/5/20 dB.
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            transmitters: 2,
            receivers: 2,
            snapshots: 2,
            sigma_w: default_colored_noise(),
            correlated: Spectrum::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap(),
            uncorrelated: Spectrum::flat(4, 1.0).unwrap(),
            tau_grid: default_tau_grid(),
            snr_db: vec![0.0, 5.0, 20.0],
            log_base: LogBase::Bits,
        }
    }
}

impl CorrelationSweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = load_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema)?;
        let mn = self.transmitters * self.receivers;
        let nk = self.receivers * self.snapshots;
        if mn == 0 || nk == 0 {
            return Err(Error::Config("array dimensions must be positive".into()));
        }
        if self.snapshots < self.transmitters.max(self.receivers) {
            return Err(Error::Config(format!(
                "snapshots ({}) must be at least max(transmitters, receivers)",
                self.snapshots
            )));
        }
        for (name, s) in [("correlated", &self.correlated), ("uncorrelated", &self.uncorrelated)] {
            if s.len() != mn {
                return Err(Error::Config(format!(
                    "{name} spectrum has {} values, expected MN = {mn}",
                    s.len()
                )));
            }
        }
        if self.sigma_w.len() != nk {
            return Err(Error::Config(format!(
                "sigma_w has {} values, expected NK = {nk}",
                self.sigma_w.len()
            )));
        }
        if self.sigma_w.values().iter().any(|&v| v <= 0.0) {
            return Err(Error::Config("noise eigenvalues must be positive".into()));
        }
        let (t1, t2) = (self.correlated.trace(), self.uncorrelated.trace());
        if (t1 - t2).abs() > ORDER_TOL {
            return Err(Error::Config(format!(
                "endpoint spectra must share a trace, got {t1} and {t2}"
            )));
        }
        if t1 <= 0.0 {
            return Err(Error::Config("endpoint spectra must have positive trace".into()));
        }
        if self.tau_grid.is_empty() {
            return Err(Error::Config("tau grid is empty".into()));
        }
        if self.tau_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::Config("tau values must lie in [0, 1]".into()));
        }
        if self.tau_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("tau grid must be sorted ascending".into()));
        }
        check_snr(&self.snr_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    White,
    Colored(Spectrum),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweepConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub geometry: Scene,
    pub frequencies_hz: Vec<f64>,
    pub scatterers: usize,
    pub seed: u64,
    pub snapshots: usize,
    #[serde(default = "default_snr_grid")]
    pub snr_db: Vec<f64>,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub log_base: LogBase,
}

impl Default for FrequencySweepConfig {
    /// Two transmitters at (2, 4.8) and (2.2, 4), receivers at (0, 2) and
    /// (0, 4), a 2 m × 2 m target centered at (2, 2) with 1000 scatterers,
    /// carriers 0.1 GHz and 8 GHz.
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            geometry: Scene {
                tx_positions: vec![[2.0, 4.8], [2.2, 4.0]],
                rx_positions: vec![[0.0, 2.0], [0.0, 4.0]],
                target_center: [2.0, 2.0],
                target_dims: [2.0, 2.0],
            },
            frequencies_hz: vec![0.1e9, 8e9],
            scatterers: 1000,
            seed: 1,
            snapshots: 2,
            snr_db: default_snr_grid(),
            noise: NoiseSpec::Colored(default_colored_noise()),
            log_base: LogBase::Bits,
        }
    }
}

impl FrequencySweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = load_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `N * K`.
    pub fn noise_dimension(&self) -> usize {
        self.geometry.receivers() * self.snapshots
    }

    pub fn noise_spectrum(&self) -> Result<Spectrum> {
        match &self.noise {
            NoiseSpec::White => Spectrum::new(vec![1.0; self.noise_dimension()]),
            NoiseSpec::Colored(s) => Ok(s.clone()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema)?;
        self.geometry.validate()?;
        if self.frequencies_hz.len() < 2 {
            return Err(Error::Config("need at least two frequencies".into()));
        }
        if self.frequencies_hz.iter().any(|f| !f.is_finite() || *f <= 0.0) {
            return Err(Error::Config("frequencies must be positive".into()));
        }
        if self.scatterers == 0 {
            return Err(Error::Config("need at least one scatterer".into()));
        }
        let (m, n) = (self.geometry.transmitters(), self.geometry.receivers());
        if self.snapshots < m.max(n) {
            return Err(Error::Config(format!(
                "snapshots ({}) must be at least max(transmitters, receivers) = {}",
                self.snapshots,
                m.max(n)
            )));
        }
        if let NoiseSpec::Colored(s) = &self.noise {
            if s.len() != self.noise_dimension() {
                return Err(Error::Config(format!(
                    "colored noise has {} eigenvalues, expected NK = {}",
                    s.len(),
                    self.noise_dimension()
                )));
            }
            if s.values().iter().any(|&v| v <= 0.0) {
                return Err(Error::Config("noise eigenvalues must be positive".into()));
            }
        }
        check_snr(&self.snr_db)
    }
}
