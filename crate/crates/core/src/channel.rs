//! Geometric channel of a widely separated MIMO radar observing an extended
//! target made of `Q` point scatterers.
//!
//! Orientation: `H` is `M × N` (rows are transmitters, columns receivers) and
//! equals `(K Σ G)^T` with `G` (`Q × M`) and `K` (`N × Q`) the transmit and
//! receive phase matrices. `vec(H)` therefore stacks one length-`M` block per
//! receiver, which is what `I_N ⊗ S` expects on the right.
//!
//! The model is narrowband: propagation delays only rotate phase, there is no
//! amplitude decay, and all geometry is planar.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorize::trial_rng;
use crate::numlin::{ComplexMatrix, HermitianMatrix};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Monte Carlo draws accumulated sequentially per parallel task.
const DRAW_CHUNK: usize = 64;

/// Planar position in meters.
pub type Point = [f64; 2];

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Antenna layout and target extent; everything about the scenario except
/// the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub tx_positions: Vec<Point>,
    pub rx_positions: Vec<Point>,
    pub target_center: Point,
    /// `(d_x, d_y)` in meters.
    pub target_dims: [f64; 2],
}

impl Scene {
    pub fn new(
        tx_positions: Vec<Point>,
        rx_positions: Vec<Point>,
        target_center: Point,
        target_dims: [f64; 2],
    ) -> Result<Self> {
        let scene = Self {
            tx_positions,
            rx_positions,
            target_center,
            target_dims,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx_positions.is_empty() || self.rx_positions.is_empty() {
            return Err(Error::Config("need at least one transmitter and one receiver".into()));
        }
        let coords = self
            .tx_positions
            .iter()
            .chain(&self.rx_positions)
            .chain(std::iter::once(&self.target_center))
            .flatten()
            .chain(&self.target_dims);
        if coords.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("geometry contains a non-finite coordinate".into()));
        }
        if self.target_dims.iter().any(|&d| d <= 0.0) {
            return Err(Error::Config(format!(
                "target dimensions must be positive, got {:?}",
                self.target_dims
            )));
        }
        for (kind, list) in [("transmitter", &self.tx_positions), ("receiver", &self.rx_positions)] {
            if let Some(i) = list.iter().position(|&p| distance(p, self.target_center) == 0.0) {
                return Err(Error::Config(format!("{kind} {i} sits on the target center")));
            }
        }
        Ok(())
    }

    pub fn transmitters(&self) -> usize {
        self.tx_positions.len()
    }

    pub fn receivers(&self) -> usize {
        self.rx_positions.len()
    }

    pub fn at_frequency(&self, carrier_frequency: f64) -> Result<RadarGeometry> {
        RadarGeometry::new(self.clone(), carrier_frequency)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarGeometry {
    pub scene: Scene,
    /// Hz.
    pub carrier_frequency: f64,
}

impl RadarGeometry {
    pub fn new(scene: Scene, carrier_frequency: f64) -> Result<Self> {
        scene.validate()?;
        if !carrier_frequency.is_finite() || carrier_frequency <= 0.0 {
            return Err(Error::Config(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        Ok(Self {
            scene,
            carrier_frequency,
        })
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// `exp(-j 2π f_c d / c)`.
    pub fn phase(&self, d: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * PI * self.carrier_frequency * d / SPEED_OF_LIGHT)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScattererSet {
    pub positions: Vec<Point>,
    /// `α_q ~ CN(0, 1/Q)`.
    pub reflectivities: Vec<Complex64>,
}

impl ScattererSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Circularly symmetric complex Gaussian with the given variance.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// `q` scatterers uniform on the target rectangle with `CN(0, 1/q)`
/// reflectivities. Deterministic in `rng_seed`.
pub fn synthesize_scatterers(scene: &Scene, q: usize, rng_seed: u64) -> Result<ScattererSet> {
    if q == 0 {
        return Err(Error::Config("need at least one scatterer".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let [x0, y0] = scene.target_center;
    let [dx, dy] = scene.target_dims;
    let positions = (0..q)
        .map(|_| [x0 + dx * (rng.gen::<f64>() - 0.5), y0 + dy * (rng.gen::<f64>() - 0.5)])
        .collect();
    let variance = 1.0 / q as f64;
    let reflectivities = (0..q).map(|_| complex_gaussian(&mut rng, variance)).collect();
    Ok(ScattererSet {
        positions,
        reflectivities,
    })
}

/// `G` (`Q × M`), `K` (`N × Q`) and the diagonal of `Σ`.
#[derive(Debug, Clone)]
pub struct PathMatrices {
    pub g: ComplexMatrix,
    pub k: ComplexMatrix,
    pub sigma: Vec<Complex64>,
}

impl PathMatrices {
    /// Dense `Σ`. Only sensible for small `Q`.
    pub fn sigma_matrix(&self) -> ComplexMatrix {
        let q = self.sigma.len();
        ComplexMatrix::from_fn(q, q, |r, c| {
            if r == c {
                self.sigma[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

pub fn path_matrices(geometry: &RadarGeometry, scatterers: &ScattererSet) -> PathMatrices {
    let scene = &geometry.scene;
    let pts = &scatterers.positions;
    let g = ComplexMatrix::from_fn(pts.len(), scene.transmitters(), |q, m| {
        geometry.phase(distance(scene.tx_positions[m], pts[q]))
    });
    let k = ComplexMatrix::from_fn(scene.receivers(), pts.len(), |n, q| {
        geometry.phase(distance(scene.rx_positions[n], pts[q]))
    });
    PathMatrices {
        g,
        k,
        sigma: scatterers.reflectivities.clone(),
    }
}

/// `H[m, n] = Σ_q α_q G[q, m] K[n, q]`, i.e. `(K Σ G)^T`.
pub fn channel_matrix(g: &ComplexMatrix, k: &ComplexMatrix, sigma: &[Complex64]) -> Result<ComplexMatrix> {
    let q = sigma.len();
    if g.rows() != q || k.cols() != q {
        return Err(Error::Dimension(format!(
            "G is {}x{}, K is {}x{}, Σ has {q} entries",
            g.rows(),
            g.cols(),
            k.rows(),
            k.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(g.cols(), k.rows(), |m, n| {
        (0..q).map(|i| sigma[i] * g[(i, m)] * k[(n, i)]).sum()
    }))
}

#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub h: ComplexMatrix,
    pub paths: PathMatrices,
}

impl ChannelModel {
    pub fn build(geometry: &RadarGeometry, scatterers: &ScattererSet) -> Result<Self> {
        let paths = path_matrices(geometry, scatterers);
        let h = channel_matrix(&paths.g, &paths.k, &paths.sigma)?;
        Ok(Self { h, paths })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceMode {
    /// Exact expectation over the reflectivities.
    Analytic,
    /// Sample average over fresh reflectivity draws; positions stay fixed.
    MonteCarlo { draws: usize, seed: u64 },
}

/// `vec` of the single-scatterer channel: entry `n * M + m` is `G[q, m] K[n, q]`.
fn steering_vectors(geometry: &RadarGeometry, scatterers: &ScattererSet) -> Vec<Vec<Complex64>> {
    let paths = path_matrices(geometry, scatterers);
    let m_count = geometry.scene.transmitters();
    let n_count = geometry.scene.receivers();
    (0..scatterers.len())
        .map(|q| {
            let mut v = Vec::with_capacity(m_count * n_count);
            for n in 0..n_count {
                for m in 0..m_count {
                    v.push(paths.g[(q, m)] * paths.k[(n, q)]);
                }
            }
            v
        })
        .collect()
}

fn outer_accumulate(acc: &mut [Complex64], v: &[Complex64], weight: f64) {
    let d = v.len();
    for c in 0..d {
        let vc = v[c].conj() * weight;
        for r in 0..d {
            acc[c * d + r] += v[r] * vc;
        }
    }
}

/// `R = E[vec(H) vec(H)^H]` (`MN × MN`).
pub fn target_covariance(
    geometry: &RadarGeometry,
    scatterers: &ScattererSet,
    mode: CovarianceMode,
) -> Result<HermitianMatrix> {
    let vs = steering_vectors(geometry, scatterers);
    let q = vs.len();
    let d = geometry.scene.transmitters() * geometry.scene.receivers();
    let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
    match mode {
        CovarianceMode::Analytic => {
            let w = 1.0 / q as f64;
            for v in &vs {
                outer_accumulate(&mut acc, v, w);
            }
        }
        CovarianceMode::MonteCarlo { draws, seed } => {
            if draws == 0 {
                return Err(Error::Config("Monte Carlo needs at least one draw".into()));
            }
            let variance = 1.0 / q as f64;
            let chunks: Vec<Vec<Complex64>> = (0..draws.div_ceil(DRAW_CHUNK))
                .into_par_iter()
                .map(|chunk| {
                    let mut local = vec![Complex64::new(0.0, 0.0); d * d];
                    let mut h = vec![Complex64::new(0.0, 0.0); d];
                    let end = ((chunk + 1) * DRAW_CHUNK).min(draws);
                    for draw in chunk * DRAW_CHUNK..end {
                        let mut rng = trial_rng(seed, draw as u64);
                        h.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                        for v in &vs {
                            let alpha = complex_gaussian(&mut rng, variance);
                            for (hz, &vz) in h.iter_mut().zip(v) {
                                *hz += alpha * vz;
                            }
                        }
                        outer_accumulate(&mut local, &h, 1.0);
                    }
                    local
                })
                .collect();
            let w = 1.0 / draws as f64;
            for local in chunks {
                for (a, l) in acc.iter_mut().zip(local) {
                    *a += l * w;
                }
            }
        }
    }
    HermitianMatrix::new(ComplexMatrix::from_col_major(d, d, acc)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlatedness {
    Correlated,
    Uncorrelated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecorrelationCondition {
    pub name: &'static str,
    pub lhs: f64,
    pub threshold: f64,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecorrelationReport {
    pub conditions: [DecorrelationCondition; 4],
    pub overall: Correlatedness,
}

/// Aperture tests for a transmitter pair `(m, i)` and a receiver pair
/// `(n, j)`. Each left-hand side is `|u_a / d(a, t0) − u_b / d(b, t0)|` for
/// coordinate `u`, compared against `λ_c / d_u`. The channel counts as
/// uncorrelated once any test passes.
pub fn decorrelation_report(
    geometry: &RadarGeometry,
    tx_pair: (usize, usize),
    rx_pair: (usize, usize),
) -> Result<DecorrelationReport> {
    let scene = &geometry.scene;
    let pick = |list: &[Point], (a, b): (usize, usize), kind: &str| -> Result<(Point, Point)> {
        if a >= list.len() || b >= list.len() || a == b {
            return Err(Error::Config(format!(
                "{kind} pair ({a}, {b}) must be two distinct indices below {}",
                list.len()
            )));
        }
        Ok((list[a], list[b]))
    };
    let (ta, tb) = pick(&scene.tx_positions, tx_pair, "transmitter")?;
    let (ra, rb) = pick(&scene.rx_positions, rx_pair, "receiver")?;
    let t0 = scene.target_center;
    let lambda = geometry.wavelength();
    let [dx, dy] = scene.target_dims;

    let cond = |name, a: Point, b: Point, axis: usize, extent: f64| {
        let lhs = (a[axis] / distance(a, t0) - b[axis] / distance(b, t0)).abs();
        let threshold = lambda / extent;
        DecorrelationCondition {
            name,
            lhs,
            threshold,
            met: lhs > threshold,
        }
    };
    let conditions = [
        cond("tx_x", ta, tb, 0, dx),
        cond("tx_y", ta, tb, 1, dy),
        cond("rx_x", ra, rb, 0, dx),
        cond("rx_y", ra, rb, 1, dy),
    ];
    let overall = if conditions.iter().any(|c| c.met) {
        Correlatedness::Uncorrelated
    } else {
        Correlatedness::Correlated
    };
    Ok(DecorrelationReport { conditions, overall })
}
