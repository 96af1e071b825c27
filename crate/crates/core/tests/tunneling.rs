use magtun::cli::default_double_well;
use magtun::fields::*;
use magtun::tunneling::*;
use magtun::Error;
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_eigenvalues(mu_l: f64, mu_r: f64, w: Complex64) -> (f64, f64) {
    let m = Matrix2::new(Complex64::new(mu_l, 0.0), w, w.conj(), Complex64::new(mu_r, 0.0));
    let e = m.symmetric_eigen();
    let (a, b) = (e.eigenvalues[0], e.eigenvalues[1]);
    (a.min(b), a.max(b))
}

prop_compose! {
    fn two_level()(mu_l in -2.0..2.0f64, mu_r in -2.0..2.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64)
        -> (f64, f64, Complex64) {
        (mu_l, mu_r, Complex64::new(re, im))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_dense_hermitian_solver((mu_l, mu_r, w) in two_level()) {
        let m = two_level_model(mu_l, mu_r, w);
        let (lo, hi) = dense_eigenvalues(mu_l, mu_r, w);
        let scale = mu_l.abs().max(mu_r.abs()).max(w.norm()).max(1.0);
        prop_assert!((m.lambda_minus - lo).abs() <= 1e-14 * scale);
        prop_assert!((m.lambda_plus - hi).abs() <= 1e-14 * scale);
        let gap = ((mu_l - mu_r).powi(2) + 4.0 * w.norm_sqr()).sqrt();
        prop_assert!((m.gap() - gap).abs() <= 1e-14 * scale);
        // Eigenvector equations and orthonormality.
        let mat = [[Complex64::new(mu_l, 0.0), w], [w.conj(), Complex64::new(mu_r, 0.0)]];
        for (v, lam) in [(m.v_minus, m.lambda_minus), (m.v_plus, m.lambda_plus)] {
            for row in mat {
                let r = row[0] * v[0] + row[1] * v[1];
                let k = if row == mat[0] { 0 } else { 1 };
                prop_assert!((r - lam * v[k]).norm() <= 1e-14 * scale);
            }
            prop_assert!((v[0].norm_sqr() + v[1].norm_sqr() - 1.0).abs() <= 1e-14);
        }
        let overlap = m.v_minus[0].conj() * m.v_plus[0] + m.v_minus[1].conj() * m.v_plus[1];
        prop_assert!(overlap.norm() <= 1e-14);
    }

    #[test]
    fn interlacing((mu_l, mu_r, w) in two_level()) {
        let m = two_level_model(mu_l, mu_r, w);
        prop_assert!(m.lambda_minus <= mu_l.min(mu_r));
        prop_assert!(m.lambda_plus >= mu_l.max(mu_r));
    }

    #[test]
    fn hopping_inverts_the_gap((mu_l, mu_r, w) in two_level()) {
        let m = two_level_model(mu_l, mu_r, w);
        let back = hopping_from_gap(m.gap(), mu_l - mu_r).unwrap();
        prop_assert!((back - w.norm()).abs() <= 1e-7 * (1.0 + w.norm()));
    }
}

#[test]
fn eigenvector_dichotomy() {
    let w = Complex64::new(1e-3, 2e-4);
    let wa = w.norm();
    // Deeper right well, |Δμ|/|w| = 100.
    let m = two_level_model(100.0 * wa, 0.0, w);
    assert_eq!(m.regime, Regime::Localized);
    assert!(m.v_minus[1].norm_sqr() >= 0.999);
    let m = two_level_model(0.0, 100.0 * wa, w);
    assert!(m.v_minus[0].norm_sqr() >= 0.999);
    // |Δμ|/|w| = 0.01.
    let m = two_level_model(0.01 * wa, 0.0, w);
    assert_eq!(m.regime, Regime::Delocalized);
    assert!((m.left_weight_minus() - 0.5).abs() <= 0.01);
    assert_eq!(two_level_model(wa, 0.0, w).regime, Regime::Crossover);
}

fn synthetic(hs: &[f64], noise: Option<&mut ChaCha8Rng>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut noise = noise;
    for &h in hs {
        let mut g = 2.0 * 0.7 * h.sqrt() * (-3.0 / h).exp();
        if let Some(rng) = noise.as_deref_mut() {
            g *= 1.0 + rng.gen_range(-0.01..0.01);
        }
        out.push((h, g));
    }
    out
}

const HS: [f64; 7] = [0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2];

#[test]
fn fit_recovers_noiseless_synthetic_splitting() {
    let fit = fit_splitting(&synthetic(&HS, None), &DEFAULT_NU_GRID).unwrap();
    assert!((fit.s_fit - 3.0).abs() < 1e-6);
    assert_eq!(fit.nu_fit, 0.5);
    assert!((fit.c0_fit - 0.7).abs() < 1e-6);
    assert_eq!(fit.candidates.len(), 5);
    assert!(fit.candidates.iter().all(|c| c.residual >= fit.residual));
}

#[test]
fn fit_tolerates_one_percent_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let fit = fit_splitting(&synthetic(&HS, Some(&mut rng)), &DEFAULT_NU_GRID).unwrap();
        assert!((fit.s_fit - 3.0).abs() < 0.02 * 3.0, "S = {}", fit.s_fit);
    }
}

#[test]
fn degenerate_fits_are_rejected() {
    let three = synthetic(&[0.05, 0.1, 0.2], None);
    assert!(matches!(fit_splitting(&three, &DEFAULT_NU_GRID), Err(Error::Fit(_))));
    let narrow = synthetic(&[0.1, 0.12, 0.15, 0.19], None);
    assert!(matches!(fit_splitting(&narrow, &DEFAULT_NU_GRID), Err(Error::Fit(_))));
    let flat: Vec<(f64, f64)> = HS.iter().map(|&h| (h, 2e-5)).collect();
    assert!(matches!(fit_splitting(&flat, &DEFAULT_NU_GRID), Err(Error::Fit(_))));
    let mut bad = synthetic(&HS, None);
    bad[2].1 = 0.0;
    assert!(matches!(fit_splitting(&bad, &DEFAULT_NU_GRID), Err(Error::Fit(_))));
}

#[test]
fn thresholds_collapse_as_epsilon_vanishes() {
    let dw = default_double_well();
    let h = 0.08;
    let th = flea_thresholds(&dw, h, 1e-12).unwrap();
    assert!((th.t_low / th.t_high - 1.0).abs() < 1e-9);
    assert!((th.t_low - (-th.e0 / h).exp()).abs() < 1e-9 * th.t_low);
}

#[test]
fn default_threshold_exponent() {
    let dw = default_double_well();
    let base = dw.unperturbed();
    let left = RadialField::new(&base.left).unwrap();
    let i0 = action_constants(&base).unwrap().instanton;
    let r = dw.right.flea.unwrap().inner_radius;
    let e0 = 2.0 * left.agmon_phase(0.5 * dw.separation) - left.agmon_phase(r) + i0;
    let th = flea_thresholds(&dw.with_right_flea_amplitude(1e-4), 0.08, 0.5).unwrap();
    assert!((th.e0 - e0).abs() < 1e-14);
    assert!(th.t_low < th.t_high && th.t_high < 0.08 / 10.0);
}

#[test]
fn threshold_preconditions() {
    let dw = default_double_well().unperturbed();
    assert!(matches!(flea_thresholds(&dw, 0.08, 0.5), Err(Error::InvalidParameter(_))));
    let dw = default_double_well();
    assert!(flea_thresholds(&dw, 0.08, 0.0).is_err());
    assert!(flea_thresholds(&dw, 0.08, 1.0).is_err());
    // a = 1, L = 4 violates L > (2+√6)a.
    let w = RadialFieldSpec::new(1.0, 1.0, 0.5, ProfileKind::SmoothBump).unwrap();
    let close = DoubleWellSpec::new(w, w.with_flea(FleaSpec::default_for(1.0, 1e-4)).unwrap(), 4.0).unwrap();
    match flea_thresholds(&close, 0.08, 0.5) {
        Err(Error::Geometry(msg)) => assert!(msg.contains(CHECK_SEPARATION)),
        other => panic!("expected a geometry error, got {other:?}"),
    }
}

#[test]
fn resolvability_floor() {
    assert!(resolvable(1e-9, 0.05));
    assert!(!resolvable(1e-10, 0.05));
}
