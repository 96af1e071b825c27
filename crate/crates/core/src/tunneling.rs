//! Two-level reduction of the double well: the 2×2 interaction matrix,
//! hopping extracted from spectral gaps, fits of the exponentially small
//! splitting, and the flea localization thresholds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{action_constants, validate_geometry, DoubleWellSpec, RadialField};

/// A splitting is resolvable when `gap ≥ GAP_FLOOR_REL · λ₁`.
pub const GAP_FLOOR_REL: f64 = 1e-8;

/// Candidate prefactor exponents for [`fit_splitting`].
pub const DEFAULT_NU_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

pub fn resolvable(gap: f64, lambda1: f64) -> bool {
    gap >= GAP_FLOOR_REL * lambda1.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|μ_ℓ - μ_r| ≤ |w|/10`.
    Delocalized,
    /// `|μ_ℓ - μ_r| ≥ 10|w|`.
    Localized,
    Crossover,
}

/// Exact diagonalization of `[[μ_ℓ, w], [w̄, μ_r]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionModel {
    pub mu_l: f64,
    pub mu_r: f64,
    pub w: Complex64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Unit eigenvector of `λ₋` in the (left, right) basis.
    pub v_minus: [Complex64; 2],
    pub v_plus: [Complex64; 2],
    pub regime: Regime,
}

impl InteractionModel {
    pub fn gap(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }

    /// Weight of `v₋` on the left well.
    pub fn left_weight_minus(&self) -> f64 {
        self.v_minus[0].norm_sqr()
    }
}

pub fn two_level_model(mu_l: f64, mu_r: f64, w: Complex64) -> InteractionModel {
    let mean = 0.5 * (mu_l + mu_r);
    let half = 0.5 * (mu_l - mu_r);
    let rad = half.hypot(w.norm());
    let (lambda_minus, lambda_plus) = (mean - rad, mean + rad);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (v_minus, v_plus) = if rad == 0.0 {
        ([one, zero], [zero, one])
    } else {
        (eigvec(mu_l, mu_r, w, lambda_minus), eigvec(mu_l, mu_r, w, lambda_plus))
    };
    let dmu = (mu_l - mu_r).abs();
    let wa = w.norm();
    let regime = if dmu <= wa / 10.0 {
        Regime::Delocalized
    } else if dmu >= 10.0 * wa {
        Regime::Localized
    } else {
        Regime::Crossover
    };
    InteractionModel {
        mu_l,
        mu_r,
        w,
        lambda_minus,
        lambda_plus,
        v_minus,
        v_plus,
        regime,
    }
}

fn eigvec(mu_l: f64, mu_r: f64, w: Complex64, lambda: f64) -> [Complex64; 2] {
    // Both rows of (M - λ) give a null vector; take the better conditioned one.
    let a = [w, Complex64::new(lambda - mu_l, 0.0)];
    let b = [Complex64::new(lambda - mu_r, 0.0), w.conj()];
    let na = a[0].norm_sqr() + a[1].norm_sqr();
    let nb = b[0].norm_sqr() + b[1].norm_sqr();
    let (v, n) = if na >= nb { (a, na.sqrt()) } else { (b, nb.sqrt()) };
    let mut v = [v[0] / n, v[1] / n];
    // Phase convention: second component real positive, else the first.
    let pivot = if v[1].norm() > 1e-15 { v[1] } else { v[0] };
    let phase = pivot.conj() / pivot.norm();
    v[0] *= phase;
    v[1] *= phase;
    v
}

/// `|w| = ½√(gap² - Δμ²)`.
pub fn hopping_from_gap(gap: f64, delta_mu: f64) -> Result<f64> {
    if gap < delta_mu.abs() {
        return Err(Error::Inconsistent(format!(
            "gap {gap:.6e} is smaller than |Δμ| = {:.6e}; the two-level model cannot hold",
            delta_mu.abs()
        )));
    }
    Ok(0.5 * ((gap - delta_mu.abs()) * (gap + delta_mu.abs())).sqrt())
}

/// One candidate `ν` of the splitting regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuCandidate {
    pub nu: f64,
    pub s: f64,
    pub c0: f64,
    /// Sum of squared residuals of the log-linear regression.
    pub residual: f64,
}

/// Fit of `gap(h) = 2 c₀ h^ν e^{-S/h}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingFit {
    pub samples: Vec<(f64, f64)>,
    pub s_fit: f64,
    pub nu_fit: f64,
    pub c0_fit: f64,
    pub residual: f64,
    pub candidates: Vec<NuCandidate>,
}

/// For each `ν`, regress `log(gap) - ν log h` on `1/h`; keep the `ν` with the
/// smallest residual.
pub fn fit_splitting(samples: &[(f64, f64)], nu_grid: &[f64]) -> Result<SplittingFit> {
    if samples.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 samples, got {}", samples.len())));
    }
    if nu_grid.is_empty() {
        return Err(Error::Fit("empty ν grid".into()));
    }
    if samples.iter().any(|&(h, g)| !(h > 0.0 && g > 0.0 && g.is_finite())) {
        return Err(Error::Fit("samples need h > 0 and a positive finite gap".into()));
    }
    let hmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hmax = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if hmax < 2.0 * hmin {
        return Err(Error::Fit(format!("h range [{hmin}, {hmax}] spans less than a factor 2")));
    }
    let xs: Vec<f64> = samples.iter().map(|s| 1.0 / s.0).collect();
    let mut candidates = Vec::with_capacity(nu_grid.len());
    for &nu in nu_grid {
        let ys: Vec<f64> = samples.iter().map(|&(h, g)| g.ln() - nu * h.ln()).collect();
        let (intercept, slope) = crate::radial::linear_fit(&xs, &ys)?;
        let residual = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        candidates.push(NuCandidate {
            nu,
            s: -slope,
            c0: 0.5 * intercept.exp(),
            residual,
        });
    }
    let best = *candidates
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .unwrap();
    if !(best.s > 0.0) {
        return Err(Error::Fit(format!(
            "fitted action S = {:.3e} is not positive; the samples show no exponential decay",
            best.s
        )));
    }
    Ok(SplittingFit {
        samples: samples.to_vec(),
        s_fit: best.s,
        nu_fit: best.nu,
        c0_fit: best.c0,
        residual: best.residual,
        candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FleaThresholds {
    pub t_low: f64,
    pub t_high: f64,
    /// `2 d_ℓ(L/2) - d_ℓ(R) + I₀`.
    pub e0: f64,
}

/// `t_low = e^{-(1+ε)E₀/h}`, `t_high = e^{-(1-ε)E₀/h}`.
pub fn thresholds_from_exponent(e0: f64, h: f64, eps: f64) -> FleaThresholds {
    FleaThresholds {
        t_low: (-(1.0 + eps) * e0 / h).exp(),
        t_high: (-(1.0 - eps) * e0 / h).exp(),
        e0,
    }
}

/// Flea amplitudes below `t_low` leave the eigenfunctions delocalized;
/// above `t_high` (and `t ≪ h`) they localize in a single well.
pub fn flea_thresholds(dw: &DoubleWellSpec, h: f64, eps: f64) -> Result<FleaThresholds> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in (0, 1)")));
    }
    let flea = dw
        .right
        .flea
        .ok_or_else(|| Error::InvalidParameter("flea thresholds need a flea on the right well".into()))?;
    let base = dw.unperturbed();
    let report = validate_geometry(&base)?;
    if !report.all_passed() {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
        return Err(Error::Geometry(names.join("; ")));
    }
    let left = RadialField::new(&base.left)?;
    let i0 = action_constants(&base)?.instanton;
    let e0 = 2.0 * left.agmon_phase(0.5 * dw.separation) - left.agmon_phase(flea.inner_radius) + i0;
    Ok(thresholds_from_exponent(e0, h, eps))
}

/// `(t e^{-(1+ε)d_R/h}, t e^{-(1-ε)d_R/h})`.
pub fn gap_bounds_flea(t: f64, h: f64, d_r: f64, eps: f64) -> (f64, f64) {
    (t * (-(1.0 + eps) * d_r / h).exp(), t * (-(1.0 - eps) * d_r / h).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn symmetric_pair() {
        let m = two_level_model(1.0, 1.0, c(0.1));
        assert!((m.lambda_minus - 0.9).abs() < 1e-15 && (m.lambda_plus - 1.1).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.v_minus[0] - c(-s)).norm() < 1e-15 && (m.v_minus[1] - c(s)).norm() < 1e-15);
        assert!((m.v_plus[0] - c(s)).norm() < 1e-15 && (m.v_plus[1] - c(s)).norm() < 1e-15);
        assert_eq!(m.regime, Regime::Delocalized);
    }

    #[test]
    fn diagonal_pair() {
        let m = two_level_model(2.0, 1.0, c(0.0));
        assert_eq!((m.lambda_minus, m.lambda_plus), (1.0, 2.0));
        assert!((m.v_minus[1] - c(1.0)).norm() < 1e-15);
        assert!((m.v_plus[0] - c(1.0)).norm() < 1e-15);
        assert_eq!(m.regime, Regime::Localized);
    }

    #[test]
    fn pythagorean_gap() {
        let m = two_level_model(0.006, 0.0, c(0.004));
        assert!((m.gap() - 0.010).abs() < 1e-15);
        assert_eq!(m.regime, Regime::Crossover);
        assert!((hopping_from_gap(0.010, 0.006).unwrap() - 0.004).abs() < 1e-15);
        assert!((hopping_from_gap(2e-5, 0.0).unwrap() - 1e-5).abs() < 1e-20);
        assert_eq!(hopping_from_gap(0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(hopping_from_gap(0.2, 0.3), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn threshold_arithmetic() {
        let t = thresholds_from_exponent(2.5, 0.1, 0.2);
        assert!((t.t_low - (-30.0f64).exp()).abs() < 1e-25);
        assert!((t.t_high - (-20.0f64).exp()).abs() < 1e-20);
        let (lo, hi) = gap_bounds_flea(1e-3, 0.1, 0.5, 0.1);
        assert!((lo - 4.087e-6).abs() < 1e-9 && (hi - 1.111e-5).abs() < 1e-8);
        assert_eq!(gap_bounds_flea(0.0, 0.1, 0.5, 0.1), (0.0, 0.0));
    }

    #[test]
    fn constant_gaps_do_not_fit() {
        let samples: Vec<(f64, f64)> = [0.2, 0.15, 0.1, 0.05].iter().map(|&h| (h, 1e-3)).collect();
        assert!(matches!(fit_splitting(&samples, &DEFAULT_NU_GRID), Err(Error::Fit(_))));
    }
}
