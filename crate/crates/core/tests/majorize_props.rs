mod common;

use radar_mi::majorize::{
    comparable_pair, majorizes, more_correlated, random_spectrum, schur_scan, t_transform, trial_rng, Correlation,
    SchurClass, ORDER_TOL,
};
use radar_mi::waveform::{spectral_mi, waterfill};
use radar_mi::Spectrum;

use common::*;

#[test]
fn majorization_is_reflexive_and_transitive_on_chains() {
    for seed in 0..1000u64 {
        let mut r = rng(seed);
        let dim = 2 + (seed % 7) as usize;
        let a = random_spectrum(&mut r, dim, 1.0);
        let b = t_transform(&mut r, &a);
        let c = t_transform(&mut r, &b);
        for s in [&a, &b, &c] {
            assert!(majorizes(s, s, ORDER_TOL).unwrap());
        }
        assert!(majorizes(&a, &b, ORDER_TOL).unwrap(), "seed {seed}");
        assert!(majorizes(&b, &c, ORDER_TOL).unwrap(), "seed {seed}");
        assert!(majorizes(&a, &c, ORDER_TOL).unwrap(), "seed {seed}");
    }
}

#[test]
fn scan_pairs_are_comparable() {
    for index in 0..500u64 {
        let mut r = trial_rng(11, index);
        let (a, b) = comparable_pair(&mut r, 4, 1.0);
        assert!(majorizes(&a, &b, ORDER_TOL).unwrap(), "trial {index}: {a:?} vs {b:?}");
        assert!((a.trace() - b.trace()).abs() < 1e-12);
    }
}

#[test]
fn more_correlated_matches_strict_majorization() {
    for seed in 0..500u64 {
        let mut r = rng(10_000 + seed);
        let dim = 2 + (seed % 5) as usize;
        let (x, y) = if seed % 2 == 0 {
            comparable_pair(&mut r, dim, 2.0)
        } else {
            // Independent draws: usually incomparable.
            (random_spectrum(&mut r, dim, 2.0), random_spectrum(&mut r, dim, 2.0))
        };
        let xy = majorizes(&x, &y, ORDER_TOL).unwrap();
        let yx = majorizes(&y, &x, ORDER_TOL).unwrap();
        let expected = match (xy, yx) {
            (true, false) => Correlation::First,
            (false, true) => Correlation::Second,
            (true, true) => Correlation::Equal,
            (false, false) => Correlation::Incomparable,
        };
        assert_eq!(more_correlated(&x, &y, ORDER_TOL).unwrap(), expected, "seed {seed}");
    }
}

#[test]
fn scan_of_textbook_functions() {
    let max = schur_scan(|v| v.iter().cloned().fold(f64::MIN, f64::max), 5, 1.0, 300, 1).unwrap();
    assert_eq!(max.classification, SchurClass::ConvexConsistent);
    assert!(max.concave_violation.is_some());

    let entropy = schur_scan(
        |v| -v.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>(),
        5,
        1.0,
        300,
        2,
    )
    .unwrap();
    assert_eq!(entropy.classification, SchurClass::ConcaveConsistent);

    let sum = schur_scan(|v| v.iter().sum(), 5, 1.0, 300, 3).unwrap();
    assert_eq!(sum.classification, SchurClass::ConvexConsistent);
    assert!(sum.concave_consistent());
    assert!(sum.to_string().contains("not a proof"));
}

#[test]
fn low_snr_spectral_mi_is_convex_consistent() {
    let w = Spectrum::new(vec![8.0, 4.0, 3.0, 2.0]).unwrap();
    let f = |h: &[f64]| {
        let h = Spectrum::new(h.to_vec()).unwrap();
        let a = waterfill(&h, &w, 0.01).unwrap();
        spectral_mi(&a.sigma_s, &h, &w).unwrap().value
    };
    let verdict = schur_scan(f, 4, 1.0, 500, 7).unwrap();
    assert_eq!(verdict.classification, SchurClass::ConvexConsistent, "{verdict}");
}

#[test]
fn scan_is_independent_of_thread_count() {
    let f = |v: &[f64]| v.iter().map(|x| x.powi(3)).sum::<f64>() - v[0].sqrt();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| schur_scan(f, 6, 3.0, 400, 99).unwrap())
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one.classification, many.classification);
    assert_eq!(
        format!("{:?}", one.convex_violation),
        format!("{:?}", many.convex_violation)
    );
    assert_eq!(
        format!("{:?}", one.concave_violation),
        format!("{:?}", many.concave_violation)
    );
}
