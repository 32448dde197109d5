//! Majorization order on eigenvalue spectra and Schur-convexity tooling.
//!
//! A spectrum `x` majorizes `y` when every prefix sum of `x` (sorted
//! descending) dominates the matching prefix sum of `y` and the totals agree.
//! For covariance spectra of equal trace this is the "more correlated than"
//! order: one dominant eigenvalue is fully correlated, a flat spectrum is
//! uncorrelated.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::PSD_TOL;

/// Default tolerance for every order predicate.
pub const ORDER_TOL: f64 = 1e-9;
/// Absolute slack allowed before a sampled pair counts as a violation.
pub const SCAN_TOL: f64 = 1e-12;
/// Upper bound on the number of T-transforms chained per sampled pair.
pub const MAX_T_TRANSFORMS: usize = 10;

/// Nonnegative values sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite value {v}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "not descending at index {i}: {} < {}",
                values[i],
                values[i + 1]
            )));
        }
        let last = values[values.len() - 1];
        if last < 0.0 {
            return Err(Error::InvalidSpectrum(format!("negative value {last}")));
        }
        Ok(Self(values))
    }

    /// Sorts descending before validating.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    /// Eigenvalues of a PSD matrix: round-off negatives above the PSD
    /// tolerance are clamped to zero.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Result<Self> {
        let max = eigenvalues.iter().copied().fold(0.0, f64::max);
        let mut values = Vec::with_capacity(eigenvalues.len());
        for &v in eigenvalues {
            if v < -PSD_TOL * max {
                return Err(Error::NotPsd { min_eigenvalue: v });
            }
            values.push(v.max(0.0));
        }
        Self::from_unsorted(values)
    }

    /// `n` equal entries summing to `trace`.
    pub fn flat(n: usize, trace: f64) -> Result<Self> {
        Self::new(vec![trace / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.trace() / self.0.len() as f64
    }

    /// Rescales so the values sum to `trace`.
    pub fn normalized_to(&self, trace: f64) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::InvalidSpectrum("cannot normalize a zero spectrum".into()));
        }
        Self::new(self.0.iter().map(|v| v * trace / t).collect())
    }

    /// Pointwise `t * a + (1 - t) * b`; stays sorted because both inputs are.
    pub fn interpolate(a: &Spectrum, b: &Spectrum, t: f64) -> Result<Self> {
        check_len(a, b)?;
        Self::new(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (t * x + (1.0 - t) * y).max(0.0))
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Spectrum::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Vec<f64> {
        s.0
    }
}

fn check_len(x: &Spectrum, y: &Spectrum) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `x ⪰ y`: prefix sums of `x` dominate those of `y` (within `tol`) and the
/// totals agree within `tol`.
pub fn majorizes(x: &Spectrum, y: &Spectrum, tol: f64) -> Result<bool> {
    check_len(x, y)?;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (a, b) in x.0.iter().zip(&y.0) {
        sx += a;
        sy += b;
        if sx < sy - tol {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    /// The first spectrum is strictly more correlated.
    First,
    Second,
    Equal,
    Incomparable,
}

/// Compares two equal-trace covariance spectra in the majorization sense.
pub fn more_correlated(s1: &Spectrum, s2: &Spectrum, tol: f64) -> Result<Correlation> {
    check_len(s1, s2)?;
    let (t1, t2) = (s1.trace(), s2.trace());
    if (t1 - t2).abs() > tol {
        return Err(Error::TraceMismatch { left: t1, right: t2 });
    }
    if s1.0.iter().zip(&s2.0).all(|(a, b)| (a - b).abs() <= tol) {
        return Ok(Correlation::Equal);
    }
    Ok(match (majorizes(s1, s2, tol)?, majorizes(s2, s1, tol)?) {
        (true, false) => Correlation::First,
        (false, true) => Correlation::Second,
        // both within tolerance but not pointwise equal: treat as tie
        (true, true) => Correlation::Equal,
        (false, false) => Correlation::Incomparable,
    })
}

/// Random descending spectrum with the given trace (uniform on the simplex).
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, dim: usize, trace: f64) -> Spectrum {
    let raw: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    Spectrum::from_unsorted(raw.into_iter().map(|v| v * trace / total).collect())
        .expect("normalized exponentials form a valid spectrum")
}

/// Robin-Hood transfer: moves `delta <= (b_i - b_j) / 2` from a larger entry
/// to a smaller one. The result is majorized by the input.
pub fn t_transform<R: Rng + ?Sized>(rng: &mut R, s: &Spectrum) -> Spectrum {
    let n = s.len();
    if n < 2 {
        return s.clone();
    }
    let mut v = s.0.clone();
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let (hi, lo) = if v[i] >= v[j] { (i, j) } else { (j, i) };
    let delta = rng.gen::<f64>() * (v[hi] - v[lo]) / 2.0;
    v[hi] -= delta;
    v[lo] += delta;
    Spectrum::from_unsorted(v).expect("transfer keeps entries nonnegative")
}

/// Draws `a ⪰ b` by applying between 1 and [`MAX_T_TRANSFORMS`] T-transforms
/// to a random spectrum.
pub fn comparable_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize, trace: f64) -> (Spectrum, Spectrum) {
    let a = random_spectrum(rng, dim, trace);
    let steps = rng.gen_range(1..=MAX_T_TRANSFORMS);
    let mut b = a.clone();
    for _ in 0..steps {
        b = t_transform(rng, &b);
    }
    (a, b)
}

/// RNG for trial `index` of a scan seeded with `seed`. Each trial owns an
/// independent ChaCha stream so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchurClass {
    ConvexConsistent,
    ConcaveConsistent,
    Neither,
}

/// A sampled pair `majorizing ⪰ majorized` on which `f` broke one direction.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub majorizing: Spectrum,
    pub majorized: Spectrum,
    pub f_majorizing: f64,
    pub f_majorized: f64,
}

/// Outcome of a sampling scan. "Consistent" means no sampled pair falsified
/// the property; it is not a proof.
#[derive(Debug, Clone, Serialize)]
pub struct SchurVerdict {
    pub classification: SchurClass,
    pub trials: usize,
    pub convex_violation: Option<Witness>,
    pub concave_violation: Option<Witness>,
}

impl SchurVerdict {
    pub fn convex_consistent(&self) -> bool {
        self.convex_violation.is_none()
    }

    pub fn concave_consistent(&self) -> bool {
        self.concave_violation.is_none()
    }
}

impl fmt::Display for SchurVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.classification {
            SchurClass::ConvexConsistent => "consistent with Schur-convexity",
            SchurClass::ConcaveConsistent => "consistent with Schur-concavity",
            SchurClass::Neither => "neither Schur-convex nor Schur-concave",
        };
        write!(
            f,
            "{label} over {} sampled pairs (falsification test, not a proof)",
            self.trials
        )
    }
}

pub fn schur_scan<F>(f: F, dimension: usize, trace: f64, trials: usize, rng_seed: u64) -> Result<SchurVerdict>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    schur_scan_with_tol(f, dimension, trace, trials, rng_seed, SCAN_TOL)
}

pub fn schur_scan_with_tol<F>(
    f: F,
    dimension: usize,
    trace: f64,
    trials: usize,
    rng_seed: u64,
    tol: f64,
) -> Result<SchurVerdict>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dimension == 0 {
        return Err(Error::InvalidSpectrum("dimension must be positive".into()));
    }
    let eval = |s: &Spectrum| -> Result<f64> {
        let v = f(s.values());
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective {
                value: v,
                input: s.values().to_vec(),
            })
        }
    };

    let samples: Vec<Result<Witness>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(rng_seed, t as u64);
            let (a, b) = comparable_pair(&mut rng, dimension, trace);
            Ok(Witness {
                f_majorizing: eval(&a)?,
                f_majorized: eval(&b)?,
                majorizing: a,
                majorized: b,
            })
        })
        .collect();

    let mut convex_violation = None;
    let mut concave_violation = None;
    for sample in samples {
        let w = sample?;
        if convex_violation.is_none() && w.f_majorizing < w.f_majorized - tol {
            convex_violation = Some(w.clone());
        }
        if concave_violation.is_none() && w.f_majorizing > w.f_majorized + tol {
            concave_violation = Some(w);
        }
    }
    let classification = match (&convex_violation, &concave_violation) {
        (None, _) => SchurClass::ConvexConsistent,
        (Some(_), None) => SchurClass::ConcaveConsistent,
        (Some(_), Some(_)) => SchurClass::Neither,
    };
    Ok(SchurVerdict {
        classification,
        trials,
        convex_violation,
        concave_violation,
    })
}

/// One `(i, j)` entry of the colored-noise threshold table (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRatio {
    pub i: usize,
    pub j: usize,
    /// `None` when the paired noise eigenvalues coincide.
    pub ratio: Option<f64>,
}

/// Equal-power levels `p` for which the high-SNR MI stays Schur-convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PRegion {
    /// Every ratio is zero: any `p > 0`.
    AllPositive,
    /// `p ∈ (0, bound]`.
    UpTo(f64),
    /// No pair had a defined ratio.
    Undetermined,
}

impl fmt::Display for PRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PRegion::AllPositive => write!(f, "all p > 0"),
            PRegion::UpTo(b) => write!(f, "p in (0, {b}]"),
            PRegion::Undetermined => write!(f, "undetermined"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdTable {
    pub pairs: Vec<PairRatio>,
    pub max: Option<f64>,
    pub region: PRegion,
}

impl ThresholdTable {
    pub fn undefined_pairs(&self) -> impl Iterator<Item = &PairRatio> {
        self.pairs.iter().filter(|p| p.ratio.is_none())
    }
}

/// For every `i < j`, `(σh_i − σh_j) / (σw_{T−j+1} − σw_{T−i+1})`: mode `i`
/// is paired with the `i`-th smallest noise eigenvalue. High-SNR MI under
/// equal power `p` is Schur-convex iff every ratio is at most `1/p`.
pub fn schur_threshold(sigma_h: &Spectrum, sigma_w: &Spectrum) -> Result<ThresholdTable> {
    check_len(sigma_h, sigma_w)?;
    let t = sigma_h.len();
    let h = sigma_h.values();
    let w = sigma_w.values();
    let mut pairs = Vec::with_capacity(t * t.saturating_sub(1) / 2);
    for i in 0..t {
        for j in (i + 1)..t {
            // 0-based: mode i pairs with w[t - 1 - i]
            let denom = w[t - 1 - j] - w[t - 1 - i];
            let ratio = (denom != 0.0).then(|| (h[i] - h[j]) / denom);
            pairs.push(PairRatio {
                i: i + 1,
                j: j + 1,
                ratio,
            });
        }
    }
    let max = pairs
        .iter()
        .filter_map(|p| p.ratio)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |m| m.max(r))));
    let region = match max {
        None if pairs.is_empty() => PRegion::AllPositive,
        None => PRegion::Undetermined,
        Some(m) if m <= 0.0 => PRegion::AllPositive,
        Some(m) => PRegion::UpTo(1.0 / m),
    };
    Ok(ThresholdTable { pairs, max, region })
}
