//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use radar_mi::{ComplexMatrix, HermitianMatrix, Spectrum};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_col_major(rows, cols, data).unwrap()
}

/// `BᴴB` for a square Gaussian `B`; almost surely positive definite.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    HermitianMatrix::gram(&random_matrix(rng, n, n))
}

/// Positive definite with eigenvalues bounded away from zero.
pub fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let b = random_matrix(rng, n, n);
    let g = HermitianMatrix::gram(&b);
    g.add(&HermitianMatrix::identity(n)).unwrap()
}

pub fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

pub fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let q = to_nalgebra(&random_matrix(rng, n, n)).qr().q();
    from_nalgebra(&q)
}

pub fn det(m: &ComplexMatrix) -> Complex64 {
    to_nalgebra(m).determinant()
}

/// Positive spectrum of length `n` with a random spread of scales.
pub fn random_positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect()
}

pub fn spectrum(v: Vec<f64>) -> Spectrum {
    Spectrum::from_unsorted(v).unwrap()
}

/// Water-filling by bisection on the level `ν`: `s_i = max(0, ν − w_i/h_i)`
/// with `w_i` the `i`-th smallest noise eigenvalue. Returns `(s, ν)`.
pub fn waterfill_bisection(h: &[f64], w: &[f64], p: f64) -> (Vec<f64>, f64) {
    let mut ws = w.to_vec();
    ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let floors: Vec<f64> = h
        .iter()
        .zip(&ws)
        .map(|(&hi, &wi)| if hi > 0.0 { wi / hi } else { f64::INFINITY })
        .collect();
    let used = |nu: f64| floors.iter().map(|&f| (nu - f).max(0.0)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = floors.iter().cloned().filter(|f| f.is_finite()).fold(0.0, f64::max) + p;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    (floors.iter().map(|&f| (nu - f).max(0.0)).collect(), nu)
}

/// `Σ log2(1 + s_i h_i / w_i)` with `w_i` the `i`-th smallest noise value.
pub fn spectral_mi_oracle(s: &[f64], h: &[f64], w: &[f64]) -> f64 {
    let mut ws = w.to_vec();
    ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s.iter()
        .zip(h)
        .zip(&ws)
        .map(|((&si, &hi), &wi)| (1.0 + si * hi / wi).log2())
        .sum()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

/// Runs the CLI in-process; returns `(exit code, stdout, stderr)`.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("radar-mi").chain(args.iter().copied());
    let code = radar_mi::experiments::cli_main(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Data rows of a CSV emitted by the CLI, metadata and header stripped.
pub fn csv_rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}
