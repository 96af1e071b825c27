//! Integral representation of the single-well ground state outside the well:
//!
//! ```text
//! Ψ(r) = r^γ ∫₀^∞ exp(-(b1/4h)(1+2t) r²) t^{δ-1} (1+t)^{γ-δ} dt,
//! γ = M/h,  δ = (b1 h - μ)/(2 h b1).
//! ```
//!
//! The `t^{δ-1}` singularity is removed by `t = u^{1/δ}`.

use crate::error::{Error, Result};
use crate::fields::{RadialField, RadialFieldSpec};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub b1: f64,
    pub h: f64,
    pub deficit: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl KummerParams {
    pub fn new(spec: &RadialFieldSpec, h: f64, mu: f64) -> Result<Self> {
        let deficit = RadialField::new(spec)?.deficit();
        Self::from_deficit(spec.b1, deficit, h, mu)
    }

    pub fn from_deficit(b1: f64, deficit: f64, h: f64, mu: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("h = {h} must be > 0")));
        }
        let delta = (b1 * h - mu) / (2.0 * h * b1);
        if !(delta > 0.0) {
            return Err(Error::Domain(format!(
                "δ = {delta:.3e} ≤ 0: μ = {mu} is not below the Landau level h·b1 = {}",
                h * b1
            )));
        }
        Ok(Self {
            b1,
            h,
            deficit,
            gamma: deficit / h,
            delta,
        })
    }

    fn kappa(&self, r: f64) -> f64 {
        self.b1 * r * r / (4.0 * self.h)
    }

    /// `∫₀^∞ e^{-2κt} t^{δ-1}(1+t)^{γ-δ} p(t) dt` for a polynomial weight `p`.
    fn moment<P: Fn(f64) -> f64>(&self, r: f64, weight: P) -> Result<f64> {
        let kappa = self.kappa(r);
        let (g, d) = (self.gamma, self.delta);
        // Cut where the integrand has dropped by e^{-60} relative to its bulk.
        let grow = (g - d).max(0.0) + 2.0;
        let mut tc: f64 = 1.0;
        for _ in 0..50 {
            tc = (60.0 + grow * (1.0 + tc).ln()) / (2.0 * kappa);
        }
        let uc = tc.powf(d);
        let f = |u: f64| {
            let t = u.powf(1.0 / d);
            (-2.0 * kappa * t + (g - d) * t.ln_1p()).exp() * weight(t) / d
        };
        let mut breaks = vec![0.0];
        if uc > 1.0 {
            breaks.push(1.0);
        }
        breaks.push(uc);
        quad::integrate_with_breaks(f, &breaks, 0.0, 1e-14)
    }

    /// `log Ψ(r)`.
    pub fn log_value(&self, r: f64) -> Result<f64> {
        let i = self.moment(r, |_| 1.0)?;
        Ok(self.gamma * r.ln() - self.kappa(r) + i.ln())
    }

    /// `-h d/dr log Ψ(r) = (b1 r/2)⟨1 + 2t⟩ - M/r`, differentiated under the integral.
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        let i0 = self.moment(r, |_| 1.0)?;
        let i1 = self.moment(r, |t| t)?;
        Ok(0.5 * self.b1 * r * (1.0 + 2.0 * i1 / i0) - self.deficit / r)
    }

    /// Leading large-`r` behaviour of the log derivative:
    /// `b1 r/2 - M/r + 2hδ/r`.
    pub fn asymptotic_log_derivative(&self, r: f64) -> f64 {
        0.5 * self.b1 * r - self.deficit / r + 2.0 * self.h * self.delta / r
    }
}

/// Unnormalized exterior ground state `Ψ(r)`; requires `r ≥ a`.
pub fn kummer_exterior(spec: &RadialFieldSpec, h: f64, mu: f64, r: f64) -> Result<f64> {
    if r < spec.radius {
        return Err(Error::Domain(format!("r = {r} lies inside the well radius {}", spec.radius)));
    }
    Ok(KummerParams::new(spec, h, mu)?.log_value(r)?.exp())
}

/// `-h d/dr log Ψ(r)` for the exterior representation.
pub fn kummer_log_derivative(spec: &RadialFieldSpec, h: f64, mu: f64, r: f64) -> Result<f64> {
    if r < spec.radius {
        return Err(Error::Domain(format!("r = {r} lies inside the well radius {}", spec.radius)));
    }
    KummerParams::new(spec, h, mu)?.log_derivative(r)
}
