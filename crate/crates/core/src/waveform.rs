//! MI-optimal waveform design.
//!
//! The received model is `y = S h + w` with `h ~ CN(0, R_h)` (dimension MN)
//! and `w ~ CN(0, R_w)` (dimension NK). The waveform maximizing
//! `log det(S R_h S^H + R_w) - log det(R_w)` under `Tr(S S^H) <= P` aligns
//! its right singular vectors with the target eigenbasis and its left
//! singular vectors with the noise eigenbasis, pairing the `i`-th largest
//! target eigenvalue with the `i`-th smallest noise eigenvalue. Power over
//! those modes is water-filled.
//!
//! MI is reported in bits unless a [`LogBase`] says otherwise.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorize::Spectrum;
use crate::numlin::{log_det_psd, ComplexMatrix, HermitianMatrix};

/// Slack tolerated below zero before a log-det difference counts as a failure.
const NEGATIVE_MI_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    pub fn label(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }

    fn scale_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Bits => nats / LN_2,
            LogBase::Nats => nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMethod {
    Logdet,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiResult {
    /// Bits.
    pub value: f64,
    pub method: MiMethod,
}

impl MiResult {
    pub fn in_base(&self, base: LogBase) -> f64 {
        match base {
            LogBase::Bits => self.value,
            LogBase::Nats => self.value * LN_2,
        }
    }
}

/// Vectorized transmit waveform `S̃` (NK × MN) with its power `Tr(S̃ S̃^H)`.
#[derive(Debug, Clone)]
pub struct WaveformMatrix {
    matrix: ComplexMatrix,
    power: f64,
}

impl WaveformMatrix {
    pub fn new(matrix: ComplexMatrix) -> Self {
        let power = matrix.as_slice().iter().map(|z| z.norm_sqr()).sum();
        Self { matrix, power }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn power(&self) -> f64 {
        self.power
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation {
    /// Power on mode `i`, which carries target eigenvalue `σh_i`.
    pub sigma_s: Vec<f64>,
    /// The common level `1/λ` every active mode fills up to.
    pub water_level_inverse: f64,
    pub active_count: usize,
}

/// Noise eigenvalue paired with mode `i`: the `i`-th smallest.
fn paired_noise(sigma_w: &[f64], i: usize) -> f64 {
    sigma_w[sigma_w.len() - 1 - i]
}

fn check_pairing(modes: usize, noise: usize) -> Result<()> {
    if noise < modes {
        return Err(Error::Dimension(format!(
            "{modes} target modes need at least as many noise eigenvalues, got {noise}"
        )));
    }
    Ok(())
}

/// `log det(S̃ R_h S̃^H + R_w) − log det(R_w)`.
pub fn mutual_information(waveform: &WaveformMatrix, r_h: &HermitianMatrix, r_w: &HermitianMatrix) -> Result<MiResult> {
    mutual_information_in(waveform, r_h, r_w, LogBase::Bits).map(|value| MiResult {
        value,
        method: MiMethod::Logdet,
    })
}

/// As [`mutual_information`], returning the bare value in `base`.
pub fn mutual_information_in(
    waveform: &WaveformMatrix,
    r_h: &HermitianMatrix,
    r_w: &HermitianMatrix,
    base: LogBase,
) -> Result<f64> {
    let s = waveform.matrix();
    if s.cols() != r_h.dim() || s.rows() != r_w.dim() {
        return Err(Error::Dimension(format!(
            "waveform {}x{} does not conform with R_h {}x{} and R_w {}x{}",
            s.rows(),
            s.cols(),
            r_h.dim(),
            r_h.dim(),
            r_w.dim(),
            r_w.dim()
        )));
    }
    let signal = s.matmul(r_h.matrix())?.matmul(&s.adjoint())?;
    let total = HermitianMatrix::new(signal.add(r_w.matrix())?)?;
    let noise_logdet = log_det_psd(r_w, 0.0)?;
    let nats = log_det_psd(&total, 0.0)? - noise_logdet;
    if nats < -NEGATIVE_MI_TOL {
        return Err(Error::Numerical(format!("negative mutual information {nats}")));
    }
    Ok(base.scale_nats(nats.max(0.0)))
}

/// Active-set water-filling.
///
/// Mode `i` has floor `σw_(i-th smallest) / σh_i`. Floors are visited in
/// ascending order (stable by index); the active set grows while the implied
/// level `(P + Σ floors) / k` exceeds the next floor. Zero target
/// eigenvalues have infinite floor and never activate.
pub fn waterfill(sigma_h: &Spectrum, sigma_w: &Spectrum, p_tot: f64) -> Result<PowerAllocation> {
    if !p_tot.is_finite() || p_tot <= 0.0 {
        return Err(Error::Numerical(format!(
            "total power must be positive and finite, got {p_tot}"
        )));
    }
    let h = sigma_h.values();
    let w = sigma_w.values();
    check_pairing(h.len(), w.len())?;

    let mut floors: Vec<(usize, f64)> = h
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0.0)
        .map(|(i, &g)| (i, paired_noise(w, i) / g))
        .collect();
    if floors.is_empty() {
        return Err(Error::NoUsableEigenmode);
    }
    floors.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut running = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, &(_, floor)) in floors.iter().enumerate() {
        running += floor;
        level = (p_tot + running) / (k + 1) as f64;
        active = k + 1;
        match floors.get(k + 1) {
            Some(&(_, next)) if level > next => continue,
            _ => break,
        }
    }

    let mut sigma_s = vec![0.0; h.len()];
    for &(i, floor) in &floors[..active] {
        sigma_s[i] = level - floor;
    }
    Ok(PowerAllocation {
        sigma_s,
        water_level_inverse: level,
        active_count: active,
    })
}

/// `Σ_i log(σs_i σh_i / σw_(i-th smallest) + 1)` in bits.
pub fn spectral_mi(sigma_s: &[f64], sigma_h: &Spectrum, sigma_w: &Spectrum) -> Result<MiResult> {
    spectral_mi_in(sigma_s, sigma_h, sigma_w, LogBase::Bits).map(|value| MiResult {
        value,
        method: MiMethod::Spectral,
    })
}

pub fn spectral_mi_in(sigma_s: &[f64], sigma_h: &Spectrum, sigma_w: &Spectrum, base: LogBase) -> Result<f64> {
    let h = sigma_h.values();
    let w = sigma_w.values();
    if sigma_s.len() != h.len() {
        return Err(Error::LengthMismatch {
            left: sigma_s.len(),
            right: h.len(),
        });
    }
    check_pairing(h.len(), w.len())?;
    let mut nats = 0.0;
    for (i, (&s, &g)) in sigma_s.iter().zip(h).enumerate() {
        let signal = s * g;
        if signal == 0.0 {
            continue;
        }
        let noise = paired_noise(w, i);
        if noise <= 0.0 {
            return Err(Error::Numerical(format!(
                "mode {i} has signal {signal} over zero noise: infinite MI"
            )));
        }
        nats += (signal / noise).ln_1p();
    }
    Ok(base.scale_nats(nats))
}

/// `∂f/∂σh_i = σs_i / (σh_i σs_i + σw_(i-th smallest))`, in nats per unit.
pub fn mi_partial(sigma_s: &[f64], sigma_h: &[f64], sigma_w: &[f64], i: usize) -> f64 {
    sigma_s[i] / (sigma_h[i] * sigma_s[i] + paired_noise(sigma_w, i))
}

/// `∂f/∂σh_i − ∂f/∂σh_j`. For `σh_i ≥ σh_j` a nonnegative value is the
/// Schur-convex direction.
pub fn schur_difference(sigma_s: &[f64], sigma_h: &[f64], sigma_w: &[f64], i: usize, j: usize) -> f64 {
    mi_partial(sigma_s, sigma_h, sigma_w, i) - mi_partial(sigma_s, sigma_h, sigma_w, j)
}

/// `(Π(α_i + β_i), Π(α_i + β_(n+1-i)))`: bounds on `det(A + B)` for PSD
/// `A`, `B` with descending spectra `α`, `β`.
pub fn fiedler_bounds(alpha: &Spectrum, beta: &Spectrum) -> Result<(f64, f64)> {
    let a = alpha.values();
    let b = beta.values();
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let lower = (0..n).map(|i| a[i] + b[i]).product();
    let upper = (0..n).map(|i| a[i] + b[n - 1 - i]).product();
    Ok((lower, upper))
}

#[derive(Debug, Clone)]
pub struct OptimalWaveform {
    pub waveform: WaveformMatrix,
    pub allocation: PowerAllocation,
    pub sigma_h: Spectrum,
    pub sigma_w: Spectrum,
}

/// `S̃ = V_w Z V_h^H` where column `i` of `Z` (NK × MN) holds `sqrt(σs_i)`
/// in row `NK − 1 − i`, i.e. against the `i`-th smallest noise eigenvalue.
///
/// This is the unconstrained optimum; it is generally not of the form
/// `I_N ⊗ S`.
pub fn optimal_waveform(r_h: &HermitianMatrix, r_w: &HermitianMatrix, p_tot: f64) -> Result<OptimalWaveform> {
    let mn = r_h.dim();
    let nk = r_w.dim();
    if nk < mn {
        return Err(Error::Dimension(format!(
            "waveform needs NK >= MN, got NK = {nk}, MN = {mn}"
        )));
    }
    let eig_h = r_h.psd_eig()?;
    let eig_w = r_w.psd_eig()?;
    if let Some((index, &value)) = eig_w.eigenvalues.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(Error::Singular { index, value });
    }
    let sigma_h = Spectrum::from_eigenvalues(&eig_h.eigenvalues)?;
    let sigma_w = Spectrum::new(eig_w.eigenvalues.clone())?;
    let allocation = waterfill(&sigma_h, &sigma_w, p_tot)?;

    let mut z = ComplexMatrix::zeros(nk, mn);
    for (i, &s) in allocation.sigma_s.iter().enumerate() {
        z[(nk - 1 - i, i)] = Complex64::new(s.sqrt(), 0.0);
    }
    let s = eig_w.eigenvectors.matmul(&z)?.matmul(&eig_h.eigenvectors.adjoint())?;
    Ok(OptimalWaveform {
        waveform: WaveformMatrix::new(s),
        allocation,
        sigma_h,
        sigma_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    fn example_h() -> Spectrum {
        s(&[5.0, 2.0, 1.0, 0.5])
    }

    fn example_w() -> Spectrum {
        s(&[8.0, 4.0, 3.0, 2.0])
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_waveform_has_zero_mi() {
        let w = WaveformMatrix::new(ComplexMatrix::zeros(4, 4));
        let mi = mutual_information(
            &w,
            &HermitianMatrix::identity(4),
            &HermitianMatrix::from_real_diagonal(&[8.0, 4.0, 3.0, 2.0]),
        )
        .unwrap();
        assert_eq!(mi.value, 0.0);
    }

    #[test]
    fn scalar_mi_is_one_bit() {
        let w = WaveformMatrix::new(ComplexMatrix::identity(1));
        let one = HermitianMatrix::identity(1);
        let mi = mutual_information(&w, &one, &one).unwrap();
        assert!(close(mi.value, 1.0, 1e-15));
        assert!(close(mi.in_base(LogBase::Nats), LN_2, 1e-15));
    }

    #[test]
    fn singular_noise_is_rejected() {
        let w = WaveformMatrix::new(ComplexMatrix::identity(2));
        let r_w = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            mutual_information(&w, &HermitianMatrix::identity(2), &r_w),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn single_mode_waterfill() {
        let a = waterfill(&s(&[1.0]), &s(&[1.0]), 3.0).unwrap();
        assert_eq!(a.sigma_s, vec![3.0]);
        assert_eq!(a.water_level_inverse, 4.0);
        assert_eq!(a.active_count, 1);
    }

    #[test]
    fn waterfill_example_spectra() {
        // floors [0.4, 1.5, 4, 16]
        let a = waterfill(&example_h(), &example_w(), 1.0).unwrap();
        assert_eq!(a.active_count, 1);
        assert!(close(a.water_level_inverse, 1.4, 1e-15));
        assert!(close(a.sigma_s[0], 1.0, 1e-15));
        assert_eq!(&a.sigma_s[1..], &[0.0, 0.0, 0.0]);

        let a = waterfill(&example_h(), &example_w(), 4.0).unwrap();
        assert_eq!(a.active_count, 2);
        assert!(close(a.water_level_inverse, 2.95, 1e-15));
        assert!(close(a.sigma_s[0], 2.55, 1e-15));
        assert!(close(a.sigma_s[1], 1.45, 1e-15));
        assert_eq!(&a.sigma_s[2..], &[0.0, 0.0]);
    }

    #[test]
    fn waterfill_skips_zero_modes() {
        let a = waterfill(&s(&[1.0, 0.0, 0.0, 0.0]), &example_w(), 100.0).unwrap();
        assert_eq!(a.sigma_s, vec![100.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            waterfill(&s(&[0.0, 0.0]), &s(&[1.0, 1.0]), 1.0),
            Err(Error::NoUsableEigenmode)
        ));
        assert!(waterfill(&example_h(), &example_w(), 0.0).is_err());
        assert!(waterfill(&example_h(), &s(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn spectral_mi_examples() {
        assert_eq!(spectral_mi(&[0.0; 4], &example_h(), &example_w()).unwrap().value, 0.0);
        let mi = spectral_mi(&[1.0, 0.0, 0.0, 0.0], &example_h(), &example_w()).unwrap();
        assert!(close(mi.value, 3.5f64.log2(), 1e-15));
        assert_eq!(mi.method, MiMethod::Spectral);
        let zero_noise = s(&[1.0, 0.0]);
        assert!(spectral_mi(&[1.0, 0.0], &s(&[1.0, 1.0]), &zero_noise).is_err());
        // a silent mode over zero noise contributes nothing
        assert!(spectral_mi(&[0.0, 1.0], &s(&[1.0, 1.0]), &zero_noise).is_ok());
    }

    #[test]
    fn fiedler_examples() {
        assert_eq!(fiedler_bounds(&s(&[1.0, 1.0]), &s(&[1.0, 1.0])).unwrap(), (4.0, 4.0));
        assert_eq!(fiedler_bounds(&s(&[2.0, 1.0]), &s(&[3.0, 1.0])).unwrap(), (10.0, 12.0));
        assert!(fiedler_bounds(&s(&[1.0]), &s(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn optimal_waveform_on_example_spectra() {
        let r_h = HermitianMatrix::from_real_diagonal(example_h().values());
        let r_w = HermitianMatrix::from_real_diagonal(example_w().values());
        let opt = optimal_waveform(&r_h, &r_w, 1.0).unwrap();
        assert!(close(opt.waveform.power(), 1.0, 1e-12));
        let mi = mutual_information(&opt.waveform, &r_h, &r_w).unwrap();
        assert!(close(mi.value, 3.5f64.log2(), 1e-12), "{}", mi.value);
    }

    #[test]
    fn optimal_waveform_white_noise() {
        let r_h = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 0.5]);
        let r_w = HermitianMatrix::identity(5);
        let opt = optimal_waveform(&r_h, &r_w, 2.0).unwrap();
        let expected: f64 = opt
            .allocation
            .sigma_s
            .iter()
            .zip([3.0, 1.0, 0.5])
            .map(|(s, h)| (1.0 + s * h).log2())
            .sum();
        let mi = mutual_information(&opt.waveform, &r_h, &r_w).unwrap();
        assert!(close(mi.value, expected, 1e-12));
    }

    #[test]
    fn optimal_waveform_needs_enough_noise_dimensions() {
        let err = optimal_waveform(&HermitianMatrix::identity(4), &HermitianMatrix::identity(2), 1.0).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn schur_difference_at_threshold() {
        let h = example_h();
        let w = example_w();
        let p = 1.0 / 3.0;
        let d = schur_difference(&[p; 4], h.values(), w.values(), 0, 1);
        assert!(d.abs() < 1e-15);
    }
}
