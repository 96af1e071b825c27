//! Reduced radial operators of a single well.
//!
//! In the circular gauge the single-well operator splits into angular
//! sectors `m`; each sector is the 1D operator
//!
//! ```text
//! P = -h² (1/r) ∂_r r ∂_r + (a(r) - m h)² / r²
//! ```
//!
//! on `L²(r dr)`, where `a(r)` is the flux function of the (possibly
//! flea-perturbed) field. It is discretized in flux form on a uniform grid
//! so that the matrix is symmetric in the `r dr` inner product.

mod kummer;
pub mod tridiag;

pub use kummer::{kummer_exterior, kummer_log_derivative, KummerParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{RadialField, RadialFieldSpec};
use crate::quad;
use tridiag::SymTridiag;

/// Grid points per magnetic length `√(h/b1)` used by default.
pub const DEFAULT_POINTS_PER_LENGTH: f64 = 32.0;
/// Default truncation radius is `a + DEFAULT_TAIL·√(h/b1)`.
pub const DEFAULT_TAIL: f64 = 12.0;
/// Smallest admissible truncation margin in magnetic lengths.
pub const MIN_TAIL: f64 = 10.0;
pub const MIN_POINTS: usize = 512;
/// Relative residual required of every returned eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_EIGENPAIRS: usize = 10;

pub fn magnetic_length(h: f64, b1: f64) -> f64 {
    (h / b1).sqrt()
}

/// Uniform grid `r_j = j·r_max/n`, `j = 0..n`, Dirichlet at `r_n = r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Self {
        Self { r_max, n }
    }

    /// `r_max = a + 12ℓ` with `points_per_length` nodes per magnetic length `ℓ`.
    pub fn with_density(spec: &RadialFieldSpec, h: f64, points_per_length: f64) -> Self {
        let ell = magnetic_length(h, spec.b1);
        let r_max = spec.radius + DEFAULT_TAIL * ell;
        let n = ((r_max * points_per_length / ell).ceil() as usize).max(MIN_POINTS);
        Self { r_max, n }
    }

    pub fn default_for(spec: &RadialFieldSpec, h: f64) -> Self {
        Self::with_density(spec, h, DEFAULT_POINTS_PER_LENGTH)
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n as f64
    }

    /// Same interval, twice as many cells. Every node of `self` is a node of the result.
    pub fn refined(&self) -> Self {
        Self {
            r_max: self.r_max,
            n: 2 * self.n,
        }
    }
}

/// Sector operator in symmetric form `W^{-1/2} K W^{-1/2}`.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub spec: RadialFieldSpec,
    pub h: f64,
    pub m: i32,
    pub grid: RadialGrid,
    /// Radii of the unknowns (node 0 is present only for `m = 0`).
    pub nodes: Vec<f64>,
    /// Quadrature weights approximating `r dr`.
    pub weights: Vec<f64>,
    /// `(a(r) - m h)² / r²` at the nodes.
    pub potential: Vec<f64>,
    /// Stiffness matrix `K`, so that `⟨P u, v⟩_w = vᵀ K u`.
    pub stiffness: SymTridiag,
    sym: SymTridiag,
}

pub fn assemble_radial(spec: &RadialFieldSpec, h: f64, m: i32, grid: RadialGrid) -> Result<RadialOperator> {
    let field = RadialField::new(spec)?;
    assemble_with_flux(spec, h, m, grid, |r| field.flux(r))
}

fn check_grid(spec: &RadialFieldSpec, h: f64, grid: &RadialGrid) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h = {h} must be > 0")));
    }
    let ell = magnetic_length(h, spec.b1);
    if grid.n < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "radial grid needs at least {MIN_POINTS} points, got {}",
            grid.n
        )));
    }
    if grid.r_max < spec.radius + MIN_TAIL * ell * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "r_max = {} is below a + {MIN_TAIL}·√(h/b1) = {}",
            grid.r_max,
            spec.radius + MIN_TAIL * ell
        )));
    }
    let limit = ell / 8.0;
    if grid.spacing() > limit {
        return Err(Error::Resolution {
            spacing: grid.spacing(),
            limit,
            magnetic_length: ell,
        });
    }
    Ok(())
}

fn assemble_with_flux<F: Fn(f64) -> f64>(
    spec: &RadialFieldSpec,
    h: f64,
    m: i32,
    grid: RadialGrid,
    flux: F,
) -> Result<RadialOperator> {
    check_grid(spec, h, &grid)?;
    let dr = grid.spacing();
    let h2 = h * h;
    let first = if m == 0 { 0 } else { 1 };
    let mh = m as f64 * h;

    let mut nodes = Vec::with_capacity(grid.n);
    let mut weights = Vec::with_capacity(grid.n);
    let mut potential = Vec::with_capacity(grid.n);
    let mut diag = Vec::with_capacity(grid.n);
    let mut off = Vec::with_capacity(grid.n);
    for j in first..grid.n {
        let r = j as f64 * dr;
        let (w, v) = if j == 0 {
            // Control volume [0, dr/2]; a(r)/r → 0 at the origin.
            (dr * dr / 8.0, 0.0)
        } else {
            let q = (flux(r) - mh) / r;
            (r * dr, q * q)
        };
        let r_minus = if j == 0 { 0.0 } else { (j as f64 - 0.5) * dr };
        let r_plus = (j as f64 + 0.5) * dr;
        nodes.push(r);
        weights.push(w);
        potential.push(v);
        diag.push(h2 * (r_minus + r_plus) / dr + v * w);
        if j + 1 < grid.n {
            off.push(-h2 * r_plus / dr);
        }
    }
    let stiffness = SymTridiag::new(diag, off);
    let s: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let sym = SymTridiag::new(
        stiffness.diag.iter().zip(&s).map(|(d, si)| d * si * si).collect(),
        stiffness.off.iter().enumerate().map(|(i, o)| o * s[i] * s[i + 1]).collect(),
    );
    Ok(RadialOperator {
        spec: *spec,
        h,
        m,
        grid,
        nodes,
        weights,
        potential,
        stiffness,
        sym,
    })
}

impl RadialOperator {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `P u = W⁻¹ K u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let ku = self.stiffness.apply(u);
        ku.iter().zip(&self.weights).map(|(k, w)| k / w).collect()
    }

    /// Discrete `∫ u v r dr`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.weights).map(|((a, b), w)| a * b * w).sum()
    }

    pub fn symmetric_form(&self) -> &SymTridiag {
        &self.sym
    }

    /// Same operator on the refined grid.
    pub fn refined(&self) -> Result<Self> {
        assemble_radial(&self.spec, self.h, self.m, self.grid.refined())
    }

    /// The `k` lowest eigenpairs of this discrete operator, without extrapolation.
    pub fn eigenpairs(&self, k: usize) -> Result<Vec<RadialEigenpair>> {
        if k == 0 || k > MAX_EIGENPAIRS {
            return Err(Error::InvalidParameter(format!("k = {k} must lie in 1..={MAX_EIGENPAIRS}")));
        }
        let mut out = Vec::with_capacity(k);
        for idx in 0..k {
            let mu = self.sym.eigenvalue(idx);
            // Fine grids cannot beat the roundoff floor ε‖T‖.
            let tol = (RESIDUAL_TOL * mu.abs()).max(64.0 * f64::EPSILON * self.sym.norm_inf());
            let (mut phi, _) = self.sym.eigenvector(mu, tol)?;
            self.sym.refine_tail(mu, &mut phi);
            let residual = tridiag::residual(&self.sym, &phi, mu);
            let mut psi: Vec<f64> = phi.iter().zip(&self.weights).map(|(p, w)| p / w.sqrt()).collect();
            // Fix the sign by the largest component.
            let big = psi.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if big < 0.0 {
                psi.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(RadialEigenpair {
                mu,
                psi,
                nodes: self.nodes.clone(),
                residual,
                m: self.m,
                mu_extrapolated: mu,
                extrapolation_error: f64::NAN,
            });
        }
        Ok(out)
    }
}

/// Eigenvalue and grid eigenfunction of one sector operator.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialEigenpair {
    /// Eigenvalue on the operator's own grid.
    pub mu: f64,
    /// Eigenfunction at `nodes`, unit norm in the discrete `r dr` measure.
    pub psi: Vec<f64>,
    pub nodes: Vec<f64>,
    /// `‖T φ - μ φ‖` for the symmetric form, with `φ = W^{1/2} ψ`.
    pub residual: f64,
    pub m: i32,
    /// `(4 μ_{2n} - μ_n) / 3`.
    pub mu_extrapolated: f64,
    /// `|μ_{2n} - μ_n| / 3`.
    pub extrapolation_error: f64,
}

impl RadialEigenpair {
    /// Linear interpolation of ψ at radius `r` (0 beyond the grid).
    pub fn value_at(&self, r: f64) -> f64 {
        let dr = self.nodes[1] - self.nodes[0];
        let pos = (r - self.nodes[0]) / dr;
        if pos < 0.0 {
            return self.psi[0];
        }
        let i = pos.floor() as usize;
        if i + 1 >= self.psi.len() {
            return if i < self.psi.len() { self.psi[i] * (1.0 - (pos - i as f64)) } else { 0.0 };
        }
        let f = pos - i as f64;
        self.psi[i] * (1.0 - f) + self.psi[i + 1] * f
    }
}

/// Lowest `k` eigenpairs on the operator's grid, with a Richardson estimate
/// from one refinement attached.
pub fn lowest_eigenpairs_radial(op: &RadialOperator, k: usize) -> Result<Vec<RadialEigenpair>> {
    let mut coarse = op.eigenpairs(k)?;
    let fine = op.refined()?.eigenpairs(k)?;
    for (c, f) in coarse.iter_mut().zip(&fine) {
        c.mu_extrapolated = (4.0 * f.mu - c.mu) / 3.0;
        c.extrapolation_error = (f.mu - c.mu).abs() / 3.0;
    }
    Ok(coarse)
}

/// Ground state of the `m = 0` sector on the default grid.
pub fn ground_state(spec: &RadialFieldSpec, h: f64) -> Result<RadialEigenpair> {
    let op = assemble_radial(spec, h, 0, RadialGrid::default_for(spec, h))?;
    Ok(lowest_eigenpairs_radial(&op, 1)?.remove(0))
}

/// Harmonic constants at the bottom of a radial well, `H = ½ Hess B(0) = c·I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicConstants {
    /// `√(det H) / min B`.
    pub d: f64,
    /// `(tr H^{1/2})² / (2 min B)`.
    pub d_prime: f64,
    pub min_field: f64,
    pub curvature: f64,
}

impl HarmonicConstants {
    pub fn of(spec: &RadialFieldSpec) -> Result<Self> {
        let c = spec.curvature();
        if !(c > 0.0) {
            return Err(Error::DegenerateWell(format!(
                "depth = {} gives a vanishing Hessian at the minimum",
                spec.depth
            )));
        }
        let b0 = spec.min_field();
        let det_sqrt = c;
        let trace_sqrt = 2.0 * c.sqrt();
        Ok(Self {
            d: det_sqrt / b0,
            d_prime: trace_sqrt * trace_sqrt / (2.0 * b0),
            min_field: b0,
            curvature: c,
        })
    }
}

/// How the eigenvalue label `j` in `h min B + h²(2j d + d′)` is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Ground state is `j = 0`.
    FromZero,
    /// Ground state is `j = 1`.
    FromOne,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::FromZero, Convention::FromOne];

    /// Label of the ground state.
    pub fn ground(self) -> u32 {
        match self {
            Convention::FromZero => 0,
            Convention::FromOne => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::FromZero => "from_zero",
            Convention::FromOne => "from_one",
        }
    }
}

/// `h·min B + h²(2j d + d′)` with `j` labelled in the given convention.
pub fn theorem21_prediction(spec: &RadialFieldSpec, h: f64, j: u32, convention: Convention) -> Result<f64> {
    if j < convention.ground() {
        return Err(Error::InvalidParameter(format!(
            "label j = {j} is below the ground label of convention {}",
            convention.name()
        )));
    }
    let hc = HarmonicConstants::of(spec)?;
    Ok(h * hc.min_field + h * h * h2_coefficient(&hc, j))
}

fn h2_coefficient(hc: &HarmonicConstants, j: u32) -> f64 {
    2.0 * j as f64 * hc.d + hc.d_prime
}

/// Least-squares fit of `(μ₁(h) - h min B)/h² = C + C₁ h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundFit {
    pub hs: Vec<f64>,
    pub mus: Vec<f64>,
    /// Fitted `h²` coefficient `C`.
    pub coefficient: f64,
    /// Fitted `h³` coefficient `C₁`.
    pub next_order: f64,
}

/// Comparison of the fitted ground-state `h²` coefficient with both labellings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub fit: GroundFit,
    pub predicted_from_zero: f64,
    pub predicted_from_one: f64,
    pub rel_error_from_zero: f64,
    pub rel_error_from_one: f64,
    /// The unique convention within tolerance, if there is exactly one.
    pub matching: Option<Convention>,
}

pub fn fit_ground_coefficient(spec: &RadialFieldSpec, hs: &[f64]) -> Result<GroundFit> {
    if hs.len() < 2 {
        return Err(Error::Fit("need at least two values of h".into()));
    }
    let b0 = spec.min_field();
    let mut mus = Vec::with_capacity(hs.len());
    for &h in hs {
        mus.push(ground_state(spec, h)?.mu_extrapolated);
    }
    let xs = hs.to_vec();
    let ys: Vec<f64> = hs.iter().zip(&mus).map(|(h, mu)| (mu - h * b0) / (h * h)).collect();
    let (intercept, slope) = linear_fit(&xs, &ys)?;
    Ok(GroundFit {
        hs: hs.to_vec(),
        mus,
        coefficient: intercept,
        next_order: slope,
    })
}

/// Ordinary least squares `y = c0 + c1 x`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Fit the ground-state coefficient and check it against both labellings.
pub fn compare_conventions(spec: &RadialFieldSpec, hs: &[f64], rel_tol: f64) -> Result<ConventionReport> {
    let hc = HarmonicConstants::of(spec)?;
    let fit = fit_ground_coefficient(spec, hs)?;
    let zero = h2_coefficient(&hc, Convention::FromZero.ground());
    let one = h2_coefficient(&hc, Convention::FromOne.ground());
    let ez = ((fit.coefficient - zero) / zero).abs();
    let eo = ((fit.coefficient - one) / one).abs();
    let matching = match (ez <= rel_tol, eo <= rel_tol) {
        (true, false) => Some(Convention::FromZero),
        (false, true) => Some(Convention::FromOne),
        _ => None,
    };
    Ok(ConventionReport {
        fit,
        predicted_from_zero: zero,
        predicted_from_one: one,
        rel_error_from_zero: ez,
        rel_error_from_one: eo,
        matching,
    })
}

/// Lowest eigenvalues of several angular sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub h: f64,
    /// `(m, lowest eigenvalues of sector m)`.
    pub sectors: Vec<(i32, Vec<f64>)>,
}

impl SectorSpectrum {
    /// All eigenvalues from all sectors, ascending.
    pub fn merged(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.sectors.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Lowest and second-lowest single-well eigenvalues over the scanned sectors.
    pub fn lowest_two(&self) -> (f64, f64) {
        let all = self.merged();
        (all[0], all[1])
    }
}

pub fn sector_spectrum(spec: &RadialFieldSpec, h: f64, ms: &[i32], k: usize) -> Result<SectorSpectrum> {
    let grid = RadialGrid::default_for(spec, h);
    let mut sectors = Vec::with_capacity(ms.len());
    for &m in ms {
        let op = assemble_radial(spec, h, m, grid)?;
        let pairs = lowest_eigenpairs_radial(&op, k)?;
        sectors.push((m, pairs.iter().map(|p| p.mu_extrapolated).collect()));
    }
    Ok(SectorSpectrum { h, sectors })
}

/// First-order and exact eigenvalue shifts caused by the flea.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationGap {
    pub first_order: f64,
    pub exact: f64,
    pub mu_unperturbed: f64,
}

/// `α(r) = ∫₀^r β(s) s ds` at the nodes (cumulative Gauss-Kronrod per cell).
fn flea_flux(spec: &RadialFieldSpec, nodes: &[f64]) -> Vec<f64> {
    let Some(flea) = spec.flea else {
        return vec![0.0; nodes.len()];
    };
    let (lo, hi) = (flea.inner_radius, flea.inner_radius + flea.width);
    let f = |s: f64| flea.shape(s) * s;
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    let mut prev = 0.0f64;
    for &r in nodes {
        let (a, b) = (prev.max(lo), r.min(hi));
        if b > a {
            acc += quad::gauss_kronrod_15(&f, a, b).value;
        }
        out.push(acc);
        prev = r;
    }
    out
}

/// `δμ_first = ⟨R ψ₀, ψ₀⟩` with `R = (2tαa + t²α²)/r²` and `δμ_exact = μ(P_t) - μ(P_0)`,
/// both for the `m = 0` sector on one grid.
pub fn perturbation_gap(spec: &RadialFieldSpec, h: f64) -> Result<PerturbationGap> {
    perturbation_gap_on(spec, h, RadialGrid::default_for(spec, h))
}

pub fn perturbation_gap_on(spec: &RadialFieldSpec, h: f64, grid: RadialGrid) -> Result<PerturbationGap> {
    let t = spec.flea_amplitude();
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("flea amplitude t = {t} must be ≥ 0")));
    }
    let base = spec.without_flea();
    let op0 = assemble_radial(&base, h, 0, grid)?;
    let ground = op0.eigenpairs(1)?.remove(0);
    if t == 0.0 {
        return Ok(PerturbationGap {
            first_order: 0.0,
            exact: 0.0,
            mu_unperturbed: ground.mu,
        });
    }
    let field0 = RadialField::new(&base)?;
    let alpha = flea_flux(spec, &op0.nodes);
    let mut first = 0.0;
    for (j, &r) in op0.nodes.iter().enumerate() {
        if r == 0.0 || alpha[j] == 0.0 {
            continue;
        }
        let ta = t * alpha[j];
        let dv = (2.0 * ta * field0.flux(r) + ta * ta) / (r * r);
        first += op0.weights[j] * dv * ground.psi[j] * ground.psi[j];
    }
    let opt = assemble_with_flux(spec, h, 0, grid, |r| {
        let a0 = field0.flux(r);
        let idx = (r / grid.spacing()).round() as usize;
        a0 + t * alpha[idx]
    })?;
    let mu_t = opt.sym.eigenvalue(0);
    Ok(PerturbationGap {
        first_order: first,
        exact: mu_t - ground.mu,
        mu_unperturbed: ground.mu,
    })
}

/// Sup over `r ∈ [a, r_max - 3ℓ]` of `|-h log(ψ(r)/ψ(a)) - (d(r) - d(a))|`,
/// where `a` is replaced by the first node at or beyond it.
pub fn agmon_decay_check(pair: &RadialEigenpair, spec: &RadialFieldSpec, h: f64) -> Result<f64> {
    if pair.m != 0 {
        return Err(Error::InvalidParameter("Agmon check needs the m = 0 ground state".into()));
    }
    let field = RadialField::new(spec)?;
    let dr = pair.nodes[1] - pair.nodes[0];
    let r_max = *pair.nodes.last().unwrap() + dr;
    let upper = r_max - 3.0 * magnetic_length(h, spec.b1);
    let start = pair.nodes.iter().position(|&r| r >= spec.radius - 1e-12 * spec.radius);
    let Some(start) = start else {
        return Err(Error::Inconsistent("grid does not reach the well radius".into()));
    };
    let (ra, pa) = (pair.nodes[start], pair.psi[start]);
    if !(pa > 0.0) {
        return Err(Error::Inconsistent("ground state is not positive at the well edge".into()));
    }
    let da = field.agmon_phase(ra);
    let mut worst: f64 = 0.0;
    for (r, p) in pair.nodes[start..].iter().zip(&pair.psi[start..]) {
        if *r > upper {
            break;
        }
        // Underflowed or sign-polluted tail values carry no information.
        if !(*p > 1e3 * f64::MIN_POSITIVE) {
            break;
        }
        let defect = (-h * (p / pa).ln() - (field.agmon_phase(*r) - da)).abs();
        worst = worst.max(defect);
    }
    Ok(worst)
}
