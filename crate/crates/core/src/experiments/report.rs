use super::config::FrequencySweepConfig;
use super::table::{format_sig, Cell, SweepTable};
use crate::channel::{decorrelation_report, Correlatedness};
use crate::error::Result;
use crate::majorize::{schur_threshold, PRegion, Spectrum};

/// Pairwise colored-noise threshold table with its maximum and the
/// equal-power region `p ∈ (0, 1/max]` where high-SNR MI is Schur-convex.
/// Columns: `instance, i, j, ratio` (`undefined` where the paired noise
/// eigenvalues coincide).
pub fn schur_report(sigma_h: &Spectrum, sigma_w: &Spectrum) -> Result<SweepTable> {
    let table = schur_threshold(sigma_h, sigma_w)?;
    let mut out = SweepTable::new(&["instance", "i", "j", "ratio"]);
    out.meta("sigma_h", format!("{:?}", sigma_h.values()));
    out.meta("sigma_w", format!("{:?}", sigma_w.values()));
    out.meta(
        "max_ratio",
        table.max.map_or_else(|| "undefined".to_string(), |m| format_sig(m, 12)),
    );
    out.meta(
        "p_region",
        match table.region {
            PRegion::UpTo(b) => format!("(0, {}]", format_sig(b, 12)),
            PRegion::AllPositive => "all p".to_string(),
            PRegion::Undetermined => "undetermined".to_string(),
        },
    );
    let undefined = table.undefined_pairs().count();
    if undefined > 0 {
        out.meta("undefined_pairs", undefined.to_string());
    }
    for (k, p) in table.pairs.iter().enumerate() {
        out.push(vec![
            (k + 1).into(),
            p.i.into(),
            p.j.into(),
            p.ratio.map_or_else(|| Cell::from("undefined"), Cell::Num),
        ]);
    }
    Ok(out)
}

/// The four aperture conditions at every configured frequency.
pub fn decorrelation_table(
    cfg: &FrequencySweepConfig,
    tx_pair: (usize, usize),
    rx_pair: (usize, usize),
) -> Result<SweepTable> {
    cfg.geometry.validate()?;
    let mut out = SweepTable::new(&["frequency_hz", "condition", "lhs", "threshold", "met", "overall"]);
    out.meta("tx_pair", format!("{tx_pair:?}"));
    out.meta("rx_pair", format!("{rx_pair:?}"));
    for &f in &cfg.frequencies_hz {
        let report = decorrelation_report(&cfg.geometry.at_frequency(f)?, tx_pair, rx_pair)?;
        let overall = match report.overall {
            Correlatedness::Correlated => "correlated",
            Correlatedness::Uncorrelated => "uncorrelated",
        };
        for c in &report.conditions {
            out.push(vec![
                f.into(),
                c.name.into(),
                c.lhs.into(),
                c.threshold.into(),
                (if c.met { "true" } else { "false" }).into(),
                overall.into(),
            ]);
        }
    }
    Ok(out)
}
