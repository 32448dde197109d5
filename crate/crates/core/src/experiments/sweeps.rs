use rayon::prelude::*;

use super::config::{CorrelationSweepConfig, FrequencySweepConfig, NoiseSpec};
use super::table::{normalize_by_group, Cell, SweepTable};
use crate::channel::{synthesize_scatterers, target_covariance, CovarianceMode};
use crate::error::Result;
use crate::majorize::Spectrum;
use crate::numlin::HermitianMatrix;
use crate::waveform::{mutual_information_in, optimal_waveform, spectral_mi_in, waterfill};

pub const SNR_DEFINITION: &str = "total SNR: P_tot = 10^(SNR_dB/10) * Tr(R_w)";

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Total transmit power giving the requested total SNR (transmit power over
/// total noise power) against noise with this spectrum.
pub fn total_power(snr_db: f64, sigma_w: &Spectrum) -> f64 {
    db_to_linear(snr_db) * sigma_w.trace()
}

/// MI over `τ` for `σh(τ) = τ·correlated + (1 − τ)·uncorrelated`, with both
/// covariances diagonal in the same basis. Columns:
/// `tau, snr_db, p_tot, mi, normalized_mi`; normalization is per SNR.
pub fn sweep_correlation(cfg: &CorrelationSweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let points: Vec<(f64, f64)> = cfg
        .snr_db
        .iter()
        .flat_map(|&snr| cfg.tau_grid.iter().map(move |&tau| (tau, snr)))
        .collect();
    let values: Vec<Result<Vec<Cell>>> = points
        .par_iter()
        .map(|&(tau, snr)| {
            let sigma_h = Spectrum::interpolate(&cfg.correlated, &cfg.uncorrelated, tau)?;
            let p_tot = total_power(snr, &cfg.sigma_w);
            let alloc = waterfill(&sigma_h, &cfg.sigma_w, p_tot)?;
            let mi = spectral_mi_in(&alloc.sigma_s, &sigma_h, &cfg.sigma_w, cfg.log_base)?;
            Ok(vec![tau.into(), snr.into(), p_tot.into(), mi.into(), Cell::Num(0.0)])
        })
        .collect();

    let mut table = SweepTable::new(&["tau", "snr_db", "p_tot", "mi", "normalized_mi"]);
    table.meta("experiment", "correlation sweep");
    table.meta("snr_definition", SNR_DEFINITION);
    table.meta("mi_unit", cfg.log_base.label());
    table.meta("config", serde_json::to_string(cfg).expect("config serializes"));
    for row in values {
        table.push(row?);
    }
    normalize_by_group(&mut table, "snr_db", "mi", "normalized_mi");
    Ok(table)
}

/// MI over SNR for each carrier frequency on one scatterer draw (positions
/// and reflectivities shared across frequencies). Columns:
/// `frequency_hz, snr_db, p_tot, mi, normalized_mi`; normalization is per
/// SNR across frequencies.
pub fn sweep_snr_frequency(cfg: &FrequencySweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let scatterers = synthesize_scatterers(&cfg.geometry, cfg.scatterers, cfg.seed)?;
    let sigma_w = cfg.noise_spectrum()?;
    let r_w = HermitianMatrix::from_real_diagonal(sigma_w.values());

    let per_frequency: Vec<Result<Vec<Vec<Cell>>>> = cfg
        .frequencies_hz
        .par_iter()
        .map(|&f| {
            let geometry = cfg.geometry.at_frequency(f)?;
            let r_h = target_covariance(&geometry, &scatterers, CovarianceMode::Analytic)?;
            cfg.snr_db
                .iter()
                .map(|&snr| {
                    let p_tot = total_power(snr, &sigma_w);
                    let opt = optimal_waveform(&r_h, &r_w, p_tot)?;
                    let mi = mutual_information_in(&opt.waveform, &r_h, &r_w, cfg.log_base)?;
                    Ok(vec![f.into(), snr.into(), p_tot.into(), mi.into(), Cell::Num(0.0)])
                })
                .collect()
        })
        .collect();

    let mut table = SweepTable::new(&["frequency_hz", "snr_db", "p_tot", "mi", "normalized_mi"]);
    table.meta("experiment", "frequency sweep");
    table.meta("snr_definition", SNR_DEFINITION);
    table.meta(
        "noise",
        match cfg.noise {
            NoiseSpec::White => "white (identity)".to_string(),
            NoiseSpec::Colored(ref s) => format!("colored {:?}, identity eigenbasis", s.values()),
        },
    );
    table.meta("seed", cfg.seed.to_string());
    table.meta("mi_unit", cfg.log_base.label());
    table.meta("config", serde_json::to_string(cfg).expect("config serializes"));
    for rows in per_frequency {
        for row in rows? {
            table.push(row);
        }
    }
    normalize_by_group(&mut table, "snr_db", "mi", "normalized_mi");
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tau_point_normalizes_to_one() {
        let cfg = CorrelationSweepConfig {
            tau_grid: vec![0.4],
            snr_db: vec![3.0],
            ..Default::default()
        };
        let t = sweep_correlation(&cfg).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.column("normalized_mi"), vec![1.0]);
    }

    #[test]
    fn endpoint_ordering_flips_with_snr() {
        let cfg = CorrelationSweepConfig {
            tau_grid: vec![0.0, 1.0],
            snr_db: vec![0.0, 20.0],
            ..Default::default()
        };
        let mi = sweep_correlation(&cfg).unwrap().column("mi");
        // rows: (τ=0, 0 dB), (τ=1, 0 dB), (τ=0, 20 dB), (τ=1, 20 dB)
        assert!(mi[1] > mi[0], "{mi:?}");
        assert!(mi[2] > mi[3], "{mi:?}");
    }

    #[test]
    fn power_from_snr() {
        let w = Spectrum::new(vec![8.0, 4.0, 3.0, 2.0]).unwrap();
        assert_eq!(total_power(0.0, &w), 17.0);
        assert!((total_power(20.0, &w) - 1700.0).abs() < 1e-9);
        assert!((total_power(-10.0, &Spectrum::flat(4, 4.0).unwrap()) - 0.4).abs() < 1e-15);
    }
}
