mod common;

use num_complex::Complex64;
use rand::Rng;

use radar_mi::channel::{
    channel_matrix, decorrelation_report, path_matrices, synthesize_scatterers, target_covariance, ChannelModel,
    CovarianceMode, Scene, SPEED_OF_LIGHT,
};
use radar_mi::experiments::{sweep_snr_frequency, FrequencySweepConfig};
use radar_mi::numlin::HermitianMatrix;

use common::*;

fn scene() -> Scene {
    FrequencySweepConfig::default().geometry
}

fn rel_error(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.matrix().sub(b.matrix()).unwrap().frobenius_norm() / a.matrix().frobenius_norm()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[test]
fn path_gains_have_unit_modulus() {
    let s = synthesize_scatterers(&scene(), 300, 4).unwrap();
    for f in [0.1e9, 2.4e9, 8e9] {
        let p = path_matrices(&scene().at_frequency(f).unwrap(), &s);
        for z in p.g.as_slice().iter().chain(p.k.as_slice()) {
            assert!((z.norm() - 1.0).abs() <= 1e-15);
        }
    }
}

#[test]
fn entry_formula_matches_matrix_product() {
    for seed in 0..20u64 {
        let mut r = rng(seed);
        let q = r.gen_range(1..40);
        let s = synthesize_scatterers(&scene(), q, seed).unwrap();
        let p = path_matrices(&scene().at_frequency(r.gen_range(0.1e9..10e9)).unwrap(), &s);
        let h = channel_matrix(&p.g, &p.k, &p.sigma).unwrap();
        let product = p.k.matmul(&p.sigma_matrix()).unwrap().matmul(&p.g).unwrap().transpose();
        assert_eq!((h.rows(), h.cols()), (2, 2));
        assert!(max_abs_diff(&h, &product) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn entries_match_scalar_phase_formula() {
    let sc = scene();
    let f = 8e9;
    let s = synthesize_scatterers(&sc, 50, 21).unwrap();
    let h = ChannelModel::build(&sc.at_frequency(f).unwrap(), &s).unwrap().h;
    let mut r = rng(21);
    for _ in 0..10 {
        let m = r.gen_range(0..2);
        let n = r.gen_range(0..2);
        let expected: Complex64 = s
            .positions
            .iter()
            .zip(&s.reflectivities)
            .map(|(&pt, &a)| {
                let d = dist(sc.tx_positions[m], pt) + dist(sc.rx_positions[n], pt);
                a * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * d / SPEED_OF_LIGHT)
            })
            .sum();
        assert!((h[(m, n)] - expected).norm() <= 1e-10);
    }
}

#[test]
fn zero_reflectivity_gives_zero_channel() {
    let mut s = synthesize_scatterers(&scene(), 10, 1).unwrap();
    s.reflectivities.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    let h = ChannelModel::build(&scene().at_frequency(1e9).unwrap(), &s).unwrap().h;
    assert_eq!(h.max_abs(), 0.0);
}

#[test]
fn reflectivity_variance_is_one_over_q() {
    for seed in 0..5u64 {
        let q = 1000;
        let s = synthesize_scatterers(&scene(), q, seed).unwrap();
        let var = s.reflectivities.iter().map(|a| a.norm_sqr()).sum::<f64>() / q as f64;
        assert!((var * q as f64 - 1.0).abs() <= 0.2, "seed {seed}: {var}");
        let (cx, cy) = (scene().target_center[0], scene().target_center[1]);
        assert!(s
            .positions
            .iter()
            .all(|p| (p[0] - cx).abs() <= 1.0 && (p[1] - cy).abs() <= 1.0));
    }
}

#[test]
fn covariances_are_psd_with_trace_mn() {
    let s = synthesize_scatterers(&scene(), 200, 8).unwrap();
    for f in [0.1e9, 1e9, 8e9] {
        let g = scene().at_frequency(f).unwrap();
        let analytic = target_covariance(&g, &s, CovarianceMode::Analytic).unwrap();
        assert!((analytic.trace() - 4.0).abs() <= 1e-12);
        assert!(analytic.psd_eig().is_ok());
        let mc = target_covariance(&g, &s, CovarianceMode::MonteCarlo { draws: 300, seed: 1 }).unwrap();
        assert!(mc.psd_eig().is_ok());
    }
}

#[test]
fn single_scatterer_covariance_is_rank_one() {
    let s = synthesize_scatterers(&scene(), 1, 3).unwrap();
    let e = target_covariance(&scene().at_frequency(5e9).unwrap(), &s, CovarianceMode::Analytic)
        .unwrap()
        .eig()
        .unwrap();
    assert!((e.eigenvalues[0] - 4.0).abs() <= 1e-12);
    assert!(e.eigenvalues[1..].iter().all(|l| l.abs() <= 1e-12));
}

#[test]
fn monte_carlo_error_shrinks_like_inverse_sqrt_draws() {
    let s = synthesize_scatterers(&scene(), 100, 2).unwrap();
    let g = scene().at_frequency(8e9).unwrap();
    let analytic = target_covariance(&g, &s, CovarianceMode::Analytic).unwrap();
    let mut ratios: Vec<f64> = (0..20u64)
        .map(|seed| {
            let small = target_covariance(&g, &s, CovarianceMode::MonteCarlo { draws: 250, seed }).unwrap();
            let large = target_covariance(
                &g,
                &s,
                CovarianceMode::MonteCarlo {
                    draws: 1000,
                    seed: 1000 + seed,
                },
            )
            .unwrap();
            rel_error(&analytic, &large) / rel_error(&analytic, &small)
        })
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (ratios[9] + ratios[10]);
    assert!(median <= 0.6, "median error ratio {median}");
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let s = synthesize_scatterers(&scene(), 50, 6).unwrap();
    let g = scene().at_frequency(3e9).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| target_covariance(&g, &s, CovarianceMode::MonteCarlo { draws: 1000, seed: 5 }).unwrap())
    };
    assert_eq!(run(1).matrix().as_slice(), run(3).matrix().as_slice());
}

#[test]
fn colocated_pair_never_meets_its_conditions() {
    let mut sc = scene();
    sc.tx_positions[1] = sc.tx_positions[0];
    let report = decorrelation_report(&sc.at_frequency(8e9).unwrap(), (0, 1), (0, 1)).unwrap();
    for c in &report.conditions[..2] {
        assert_eq!(c.lhs, 0.0);
        assert!(!c.met);
    }
}

#[test]
fn decorrelation_matches_scalar_oracle() {
    let sc = scene();
    let t0 = sc.target_center;
    for f in [0.1e9, 0.5e9, 2e9, 8e9] {
        let lambda = SPEED_OF_LIGHT / f;
        let report = decorrelation_report(&sc.at_frequency(f).unwrap(), (0, 1), (0, 1)).unwrap();
        let pairs = [
            (sc.tx_positions[0], sc.tx_positions[1], 0),
            (sc.tx_positions[0], sc.tx_positions[1], 1),
            (sc.rx_positions[0], sc.rx_positions[1], 0),
            (sc.rx_positions[0], sc.rx_positions[1], 1),
        ];
        for (c, (a, b, axis)) in report.conditions.iter().zip(pairs) {
            let lhs = (a[axis] / dist(a, t0) - b[axis] / dist(b, t0)).abs();
            assert!((c.lhs - lhs).abs() <= 1e-15);
            assert!((c.threshold - lambda / sc.target_dims[axis]).abs() <= 1e-15);
        }
    }
}

#[test]
fn single_scatterer_makes_frequencies_indistinguishable() {
    let cfg = FrequencySweepConfig {
        scatterers: 1,
        ..Default::default()
    };
    let t = sweep_snr_frequency(&cfg).unwrap();
    let mi = t.column("mi");
    let half = mi.len() / 2;
    for (a, b) in mi[..half].iter().zip(&mi[half..]) {
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn repeated_frequency_gives_identical_rows() {
    let cfg = FrequencySweepConfig {
        frequencies_hz: vec![2e9, 2e9],
        ..Default::default()
    };
    let t = sweep_snr_frequency(&cfg).unwrap();
    let half = t.rows.len() / 2;
    assert_eq!(t.rows[..half], t.rows[half..]);
}
