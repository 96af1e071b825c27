//! Radial magnetic wells, flea perturbations, flux and phase integrals,
//! vector potentials, and the closed-form tunneling constants.
//!
//! A single well is a radial field `B(r)` that equals the background `b1`
//! outside the disc of radius `a` and dips to `b1 - depth` at the centre.
//! Two such wells placed at `(±L/2, 0)` make up the double-well field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Quadrature tolerance for flux-type integrals.
pub const QUAD_TOL: f64 = 1e-12;

/// Number of panels of the cumulative flux table on `[0, a]`.
const TABLE_PANELS: usize = 256;

/// `2 + √6`, the minimal separation ratio `L / a` for the double-well analysis.
pub const SEPARATION_RATIO: f64 = 4.449_489_742_783_178;

/// C∞ bump on `(-1, 1)` with unit peak at 0: `exp(1 - 1/(1 - x²))`.
fn unit_bump(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `b1 - depth·exp(1 - 1/(1 - (r/a)²))` inside the disc; C∞.
    SmoothBump,
    /// `b1 - depth·(1 - (r/a)²)²` inside the disc; C¹ only.
    PolyBump,
}

/// Annular perturbation `t·β(r)` with `β` a unit-peak C∞ bump on `[R, R + width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FleaSpec {
    pub t: f64,
    #[serde(rename = "r_inner")]
    pub inner_radius: f64,
    pub width: f64,
}

impl FleaSpec {
    /// Default flea for a well of radius `a`: support `[0.4a, 0.7a]`.
    pub fn default_for(radius: f64, t: f64) -> Self {
        Self {
            t,
            inner_radius: 0.4 * radius,
            width: 0.3 * radius,
        }
    }

    /// Shape function β(r) ≥ 0 (amplitude not included).
    pub fn shape(&self, r: f64) -> f64 {
        let half = 0.5 * self.width;
        let centre = self.inner_radius + half;
        unit_bump((r - centre) / half)
    }

    fn validate(&self, radius: f64) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("flea amplitude t = {} must be ≥ 0", self.t)));
        }
        if !(self.inner_radius > 0.0 && self.width > 0.0) {
            return Err(Error::InvalidParameter("flea support must have R > 0 and width > 0".into()));
        }
        if self.inner_radius + self.width > radius {
            return Err(Error::InvalidParameter(format!(
                "flea support [{}, {}] leaves the well disc of radius {}",
                self.inner_radius,
                self.inner_radius + self.width,
                radius
            )));
        }
        Ok(())
    }
}

/// Parameters of one radial magnetic well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFieldSpec {
    pub b1: f64,
    #[serde(rename = "a")]
    pub radius: f64,
    pub depth: f64,
    #[serde(rename = "profile_kind")]
    pub profile: ProfileKind,
    #[serde(default)]
    pub flea: Option<FleaSpec>,
}

impl RadialFieldSpec {
    pub fn new(b1: f64, radius: f64, depth: f64, profile: ProfileKind) -> Result<Self> {
        let spec = Self {
            b1,
            radius,
            depth,
            profile,
            flea: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_flea(mut self, flea: FleaSpec) -> Result<Self> {
        flea.validate(self.radius)?;
        self.flea = Some(flea);
        Ok(self)
    }

    /// Same profile with the flea removed.
    pub fn without_flea(&self) -> Self {
        Self { flea: None, ..*self }
    }

    /// Same profile with the flea amplitude replaced by `t` (no-op without a flea).
    pub fn with_flea_amplitude(&self, t: f64) -> Self {
        let mut s = *self;
        if let Some(f) = s.flea.as_mut() {
            f.t = t;
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b1 > 0.0 && self.b1.is_finite()) {
            return Err(Error::InvalidParameter(format!("b1 = {} must be > 0", self.b1)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("a = {} must be > 0", self.radius)));
        }
        if !(self.depth >= 0.0 && self.depth < self.b1) {
            return Err(Error::InvalidParameter(format!(
                "depth = {} must satisfy 0 ≤ depth < b1 = {} so that B stays positive",
                self.depth, self.b1
            )));
        }
        if let Some(f) = &self.flea {
            f.validate(self.radius)?;
        }
        Ok(())
    }

    pub fn flea_amplitude(&self) -> f64 {
        self.flea.map_or(0.0, |f| f.t)
    }

    fn well_shape(&self, r: f64) -> f64 {
        let u = r / self.radius;
        if u >= 1.0 {
            return 0.0;
        }
        match self.profile {
            ProfileKind::SmoothBump => unit_bump(u),
            ProfileKind::PolyBump => {
                let s = 1.0 - u * u;
                s * s
            }
        }
    }

    /// Unperturbed field B⁰(r).
    pub fn unperturbed_field(&self, r: f64) -> f64 {
        self.b1 - self.depth * self.well_shape(r)
    }

    /// `t·β(r)`, zero without a flea.
    pub fn flea_field(&self, r: f64) -> f64 {
        match &self.flea {
            Some(f) if f.t != 0.0 => f.t * f.shape(r),
            _ => 0.0,
        }
    }

    /// `b1 - B(r)`; vanishes identically for `r ≥ a`.
    pub fn deficit_density(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        self.depth * self.well_shape(r) - self.flea_field(r)
    }

    /// Field value B(r) = B⁰(r) + t·β(r).
    pub fn field(&self, r: f64) -> f64 {
        self.b1 - self.deficit_density(r)
    }

    /// min B = B(0) (the flea is supported away from the centre).
    pub fn min_field(&self) -> f64 {
        self.b1 - self.depth
    }

    /// `c` in `B(r) = B(0) + c r² + O(r⁴)`.
    pub fn curvature(&self) -> f64 {
        let k = self.depth / (self.radius * self.radius);
        match self.profile {
            ProfileKind::SmoothBump => k,
            ProfileKind::PolyBump => 2.0 * k,
        }
    }

    /// Radii in `[0, a]` where the integrand changes character.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        if let Some(f) = &self.flea {
            if f.t != 0.0 {
                b.push(f.inner_radius);
                b.push(f.inner_radius + f.width);
            }
        }
        b.push(self.radius);
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        b
    }
}

/// Evaluator for the integrated quantities of one well: flux function,
/// deficit and Agmon phase. Immutable after construction.
#[derive(Debug, Clone)]
pub struct RadialField {
    spec: RadialFieldSpec,
    deficit: f64,
    // Cumulative deficit flux D(r) = ∫₀^r (b1 - B) s ds at r_k = k·a/K.
    deficit_flux: Vec<f64>,
    // Cumulative ∫₀^r D(v)/v dv at the same nodes.
    phase_correction: Vec<f64>,
}

impl RadialField {
    pub fn new(spec: &RadialFieldSpec) -> Result<Self> {
        spec.validate()?;
        let step = spec.radius / TABLE_PANELS as f64;
        let breaks = spec.breakpoints();
        let mut deficit_flux = Vec::with_capacity(TABLE_PANELS + 1);
        deficit_flux.push(0.0);
        let mut acc = 0.0;
        for k in 0..TABLE_PANELS {
            let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
            acc += integrate_split(|s| spec.deficit_density(s) * s, lo, hi, &breaks, 1e-16)?;
            deficit_flux.push(acc);
        }
        let mut field = Self {
            spec: *spec,
            deficit: acc,
            deficit_flux,
            phase_correction: Vec::new(),
        };
        let mut phase = Vec::with_capacity(TABLE_PANELS + 1);
        phase.push(0.0);
        let mut acc = 0.0;
        for k in 0..TABLE_PANELS {
            let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
            acc += integrate_split(
                |v| if v > 0.0 { field.deficit_flux_at(v) / v } else { 0.0 },
                lo,
                hi,
                &breaks,
                1e-16,
            )?;
            phase.push(acc);
        }
        field.phase_correction = phase;
        Ok(field)
    }

    pub fn spec(&self) -> &RadialFieldSpec {
        &self.spec
    }

    /// Total flux deficit M = ∫₀^a (b1 - B(s)) s ds.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    fn panel(&self, r: f64) -> (usize, f64) {
        let step = self.spec.radius / TABLE_PANELS as f64;
        let k = ((r / step) as usize).min(TABLE_PANELS - 1);
        (k, k as f64 * step)
    }

    /// D(r) = ∫₀^r (b1 - B(s)) s ds.
    pub fn deficit_flux_at(&self, r: f64) -> f64 {
        if r >= self.spec.radius {
            return self.deficit;
        }
        if r <= 0.0 {
            return 0.0;
        }
        let (k, rk) = self.panel(r);
        let spec = &self.spec;
        self.deficit_flux[k] + quad::gauss_kronrod_15(&|s: f64| spec.deficit_density(s) * s, rk, r).value
    }

    /// Flux function a(r) = ∫₀^r B(s) s ds.
    pub fn flux(&self, r: f64) -> f64 {
        0.5 * self.spec.b1 * r * r - self.deficit_flux_at(r)
    }

    /// Agmon phase d(s) = ∫₀^s a(v)/v dv.
    pub fn agmon_phase(&self, s: f64) -> f64 {
        let a = self.spec.radius;
        let b1 = self.spec.b1;
        if s <= 0.0 {
            return 0.0;
        }
        if s >= a {
            let da = 0.25 * b1 * a * a - self.phase_correction[TABLE_PANELS];
            return da + 0.25 * b1 * (s * s - a * a) - self.deficit * (s / a).ln();
        }
        let (k, rk) = self.panel(s);
        let tail = quad::gauss_kronrod_15(
            &|v: f64| if v > 0.0 { self.deficit_flux_at(v) / v } else { 0.0 },
            rk,
            s,
        )
        .value;
        0.25 * b1 * s * s - self.phase_correction[k] - tail
    }

    /// `∫₀^a β(s) s ds` for the flea shape (0 without a flea).
    pub fn flea_moment(&self) -> Result<f64> {
        match &self.spec.flea {
            Some(f) => integrate_split(
                |s| f.shape(s) * s,
                f.inner_radius,
                f.inner_radius + f.width,
                &[],
                QUAD_TOL,
            ),
            None => Ok(0.0),
        }
    }
}

fn integrate_split<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    quad::integrate_with_breaks(f, &pts, tol, 1e-14)
}

/// B(r) including the flea.
pub fn eval_field(spec: &RadialFieldSpec, r: f64) -> f64 {
    spec.field(r)
}

/// `(a(r), M)` for one well.
pub fn flux_and_deficit(spec: &RadialFieldSpec, r: f64) -> Result<(f64, f64)> {
    let f = RadialField::new(spec)?;
    Ok((f.flux(r), f.deficit()))
}

/// Agmon phase d(s) of one well.
pub fn agmon_phase(spec: &RadialFieldSpec, s: f64) -> Result<f64> {
    Ok(RadialField::new(spec)?.agmon_phase(s))
}

/// Two wells centred at `(∓L/2, 0)` sharing the background field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleWellSpec {
    pub left: RadialFieldSpec,
    pub right: RadialFieldSpec,
    #[serde(rename = "L")]
    pub separation: f64,
}

impl DoubleWellSpec {
    pub fn new(left: RadialFieldSpec, right: RadialFieldSpec, separation: f64) -> Result<Self> {
        let dw = Self {
            left,
            right,
            separation,
        };
        dw.validate()?;
        Ok(dw)
    }

    /// Mirror-symmetric pair of identical wells.
    pub fn symmetric(well: RadialFieldSpec, separation: f64) -> Result<Self> {
        Self::new(well.without_flea(), well.without_flea(), separation)
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        if self.left.b1 != self.right.b1 {
            return Err(Error::InvalidParameter(format!(
                "wells must share the background field (b1 = {} vs {})",
                self.left.b1, self.right.b1
            )));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::InvalidParameter(format!("L = {} must be > 0", self.separation)));
        }
        let half = 0.5 * self.separation;
        if self.left.radius >= half || self.right.radius >= half {
            return Err(Error::Geometry("a < L/2: wells must not touch the seam x1 = 0".into()));
        }
        Ok(())
    }

    pub fn b1(&self) -> f64 {
        self.left.b1
    }

    pub fn left_center(&self) -> [f64; 2] {
        [-0.5 * self.separation, 0.0]
    }

    pub fn right_center(&self) -> [f64; 2] {
        [0.5 * self.separation, 0.0]
    }

    pub fn max_radius(&self) -> f64 {
        self.left.radius.max(self.right.radius)
    }

    /// Replace the right well's flea amplitude.
    pub fn with_right_flea_amplitude(&self, t: f64) -> Self {
        Self {
            right: self.right.with_flea_amplitude(t),
            ..*self
        }
    }

    /// The pair with every flea removed.
    pub fn unperturbed(&self) -> Self {
        Self {
            left: self.left.without_flea(),
            right: self.right.without_flea(),
            ..*self
        }
    }
}

/// Closed-form constants entering the tunneling action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionConstants {
    pub deficit_left: f64,
    pub deficit_right: f64,
    pub deficit_total: f64,
    pub instanton: f64,
    pub action: f64,
    pub saddle: f64,
    pub phase_left: f64,
    pub phase_right: f64,
}

/// Interference correction `I(b1, L, M)`. Requires `L²/4 > M/b1`.
pub fn instanton_correction(b1: f64, separation: f64, deficit: f64) -> Result<f64> {
    let l = separation;
    let disc = 0.25 * l * l - deficit / b1;
    if !(disc > 0.0) {
        return Err(Error::Geometry(format!(
            "L^2/4 > M/b1 violated: L^2/4 = {:.6e}, M/b1 = {:.6e}",
            0.25 * l * l,
            deficit / b1
        )));
    }
    let root = (1.0 - 4.0 * deficit / (b1 * l * l)).sqrt();
    Ok(0.5 * deficit - b1 * l * l / 8.0 + 0.5 * b1 * l * disc.sqrt() - deficit * (1.0 + root).ln())
}

/// Saddle ordinate q = -√(L²/4 - M/b1).
pub fn saddle_ordinate(b1: f64, separation: f64, deficit: f64) -> Result<f64> {
    let disc = 0.25 * separation * separation - deficit / b1;
    if !(disc > 0.0) {
        return Err(Error::Geometry(format!(
            "L^2/4 > M/b1 violated: L^2/4 - M/b1 = {disc:.6e}"
        )));
    }
    Ok(-disc.sqrt())
}

/// Complex phase on the seam, g(y) = (b1/2)y² + i(b1 L/2)y - M ln(1 + 2iy/L).
pub fn seam_phase(b1: f64, separation: f64, deficit: f64, y: Complex64) -> Complex64 {
    let i = Complex64::i();
    0.5 * b1 * y * y + i * (0.5 * b1 * separation) * y
        - deficit * (Complex64::new(1.0, 0.0) + i * 2.0 * y / separation).ln()
}

/// Derivative g'(y) of [`seam_phase`].
pub fn seam_phase_derivative(b1: f64, separation: f64, deficit: f64, y: Complex64) -> Complex64 {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    b1 * y + i * (0.5 * b1 * separation) - deficit * (2.0 * i / separation) / (one + i * 2.0 * y / separation)
}

pub fn action_constants(dw: &DoubleWellSpec) -> Result<ActionConstants> {
    let left = RadialField::new(&dw.left)?;
    let right = RadialField::new(&dw.right)?;
    action_constants_from(dw, &left, &right)
}

pub(crate) fn action_constants_from(
    dw: &DoubleWellSpec,
    left: &RadialField,
    right: &RadialField,
) -> Result<ActionConstants> {
    let b1 = dw.b1();
    let l = dw.separation;
    let (ml, mr) = (left.deficit(), right.deficit());
    let m = ml + mr;
    let instanton = instanton_correction(b1, l, m)?;
    let saddle = saddle_ordinate(b1, l, m)?;
    let phase_left = left.agmon_phase(0.5 * l);
    let phase_right = right.agmon_phase(0.5 * l);
    Ok(ActionConstants {
        deficit_left: ml,
        deficit_right: mr,
        deficit_total: m,
        instanton,
        action: phase_left + phase_right + instanton,
        saddle,
        phase_left,
        phase_right,
    })
}

/// Gauge choices for the vector potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// A = (0, ∫₀^{x1} B(u, x2) du); curl equals the full field.
    LandauSeam,
    /// Circular gauge of the left well alone (of the single well for a single source).
    CircularLeft,
    /// Circular gauge of the right well alone (of the single well for a single source).
    CircularRight,
}

/// A magnetic field on the plane built from one or two radial wells.
#[derive(Debug, Clone)]
pub enum FieldSource {
    Single { well: RadialField, center: [f64; 2] },
    Double { spec: DoubleWellSpec, left: RadialField, right: RadialField },
}

impl FieldSource {
    pub fn single(spec: &RadialFieldSpec, center: [f64; 2]) -> Result<Self> {
        Ok(Self::Single {
            well: RadialField::new(spec)?,
            center,
        })
    }

    pub fn double(spec: &DoubleWellSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self::Double {
            spec: *spec,
            left: RadialField::new(&spec.left)?,
            right: RadialField::new(&spec.right)?,
        })
    }

    pub fn b1(&self) -> f64 {
        match self {
            Self::Single { well, .. } => well.spec().b1,
            Self::Double { spec, .. } => spec.b1(),
        }
    }

    /// Wells with their centres.
    pub fn wells(&self) -> Vec<(&RadialField, [f64; 2])> {
        match self {
            Self::Single { well, center } => vec![(well, *center)],
            Self::Double { spec, left, right } => {
                vec![(left, spec.left_center()), (right, spec.right_center())]
            }
        }
    }

    /// b1 - B(x).
    pub fn deficit_at(&self, x: [f64; 2]) -> f64 {
        self.wells()
            .iter()
            .map(|(w, c)| w.spec().deficit_density(dist(x, *c)))
            .sum()
    }

    /// B(x).
    pub fn field_at(&self, x: [f64; 2]) -> f64 {
        self.b1() - self.deficit_at(x)
    }

    fn circular_well(&self, gauge: Gauge) -> (&RadialField, [f64; 2]) {
        match (self, gauge) {
            (Self::Single { well, center }, _) => (well, *center),
            (Self::Double { spec, left, .. }, Gauge::CircularLeft) => (left, spec.left_center()),
            (Self::Double { spec, right, .. }, _) => (right, spec.right_center()),
        }
    }

    /// Vector potential in the requested gauge.
    pub fn vector_potential(&self, gauge: Gauge, x: [f64; 2]) -> Result<[f64; 2]> {
        match gauge {
            Gauge::LandauSeam => Ok([0.0, self.seam_potential(x[0], x[1])?]),
            _ => {
                let (well, c) = self.circular_well(gauge);
                Ok(circular_potential(well, c, x))
            }
        }
    }

    /// `∫_{x1a}^{x1b} (b1 - B(u, x2)) du` along a horizontal line.
    pub fn deficit_line_integral(&self, x1a: f64, x1b: f64, x2: f64) -> Result<f64> {
        let (lo, hi, sign) = if x1a <= x1b { (x1a, x1b, 1.0) } else { (x1b, x1a, -1.0) };
        let mut total = 0.0;
        for (well, c) in self.wells() {
            let spec = well.spec();
            let dy = x2 - c[1];
            if dy.abs() >= spec.radius {
                continue;
            }
            let half_chord = (spec.radius * spec.radius - dy * dy).sqrt();
            let (ca, cb) = (c[0] - half_chord, c[0] + half_chord);
            let (ia, ib) = (lo.max(ca), hi.min(cb));
            if ib <= ia {
                continue;
            }
            let mut pts = vec![ia];
            for rb in spec.breakpoints() {
                if rb > dy.abs() {
                    let off = (rb * rb - dy * dy).sqrt();
                    for u in [c[0] - off, c[0] + off] {
                        if u > ia && u < ib {
                            pts.push(u);
                        }
                    }
                }
            }
            if dy.abs() < 1e-300 && c[0] > ia && c[0] < ib {
                pts.push(c[0]);
            }
            pts.push(ib);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            total += quad::integrate_with_breaks(
                |u| spec.deficit_density(((u - c[0]).powi(2) + dy * dy).sqrt()),
                &pts,
                1e-14,
                1e-14,
            )?;
        }
        Ok(sign * total)
    }

    /// Second component of the seam gauge, ∫₀^{x1} B(u, x2) du.
    pub fn seam_potential(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(self.b1() * x1 - self.deficit_line_integral(0.0, x1, x2)?)
    }
}

fn dist(x: [f64; 2], c: [f64; 2]) -> f64 {
    (x[0] - c[0]).hypot(x[1] - c[1])
}

/// Circular gauge A(x) = (a(ρ)/ρ²)(x - c)^⊥ with ρ = |x - c|.
pub fn circular_potential(well: &RadialField, c: [f64; 2], x: [f64; 2]) -> [f64; 2] {
    let y = [x[0] - c[0], x[1] - c[1]];
    let rho2 = y[0] * y[0] + y[1] * y[1];
    if rho2 == 0.0 {
        return [0.0, 0.0];
    }
    let rho = rho2.sqrt();
    let k = if rho >= well.spec().radius {
        0.5 * well.spec().b1 - well.deficit() / rho2
    } else {
        well.flux(rho) / rho2
    };
    [-k * y[1], k * y[0]]
}

/// `vector_potential` as a free function.
pub fn vector_potential(source: &FieldSource, gauge: Gauge, x: [f64; 2]) -> Result<[f64; 2]> {
    source.vector_potential(gauge, x)
}

/// σ_r(x) - σ_ℓ(x) from the exterior closed forms of the circular gauges.
pub fn gauge_phase_difference(dw: &DoubleWellSpec, x: [f64; 2]) -> Result<f64> {
    let half = 0.5 * dw.separation;
    if !(x[0] > -half && x[0] < half) {
        return Err(Error::Domain(format!(
            "x1 = {} outside (-L/2, L/2) = ({}, {})",
            x[0], -half, half
        )));
    }
    let ml = RadialField::new(&dw.left)?.deficit();
    let mr = RadialField::new(&dw.right)?.deficit();
    Ok(phase_difference_closed_form(dw.b1(), dw.separation, ml, mr, x))
}

pub(crate) fn phase_difference_closed_form(b1: f64, l: f64, ml: f64, mr: f64, x: [f64; 2]) -> f64 {
    let half = 0.5 * l;
    0.5 * b1 * l * x[1] - mr * (x[1] / (half - x[0])).atan() - ml * (x[1] / (x[0] + half)).atan()
}

/// One line of a [`GeometryReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryCheck {
    pub name: String,
    pub passed: bool,
    /// Signed slack of the inequality (positive when satisfied).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub checks: Vec<GeometryCheck>,
}

impl GeometryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&GeometryCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&GeometryCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_SEPARATION: &str = "L > (2+√6)a";
pub const CHECK_SEAM: &str = "a < L/2";
pub const CHECK_SADDLE: &str = "L²/4 > M/b1";
pub const CHECK_ERROR_LEFT: &str = "2d_l(L-a) > S";
pub const CHECK_ERROR_RIGHT: &str = "2d_r(L-a) > S";

/// Evaluate every geometric hypothesis of the double-well analysis.
pub fn validate_geometry(dw: &DoubleWellSpec) -> Result<GeometryReport> {
    let l = dw.separation;
    let a = dw.max_radius();
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<GeometryCheck>, name: &str, margin: f64| {
        checks.push(GeometryCheck {
            name: name.to_string(),
            passed: margin > 0.0,
            margin,
        })
    };
    push(&mut checks, CHECK_SEPARATION, l - SEPARATION_RATIO * a);
    push(&mut checks, CHECK_SEAM, 0.5 * l - a);
    let left = RadialField::new(&dw.left)?;
    let right = RadialField::new(&dw.right)?;
    let m = left.deficit() + right.deficit();
    push(&mut checks, CHECK_SADDLE, 0.25 * l * l - m / dw.b1());
    match action_constants_from(dw, &left, &right) {
        Ok(ac) => {
            let ml = 2.0 * left.agmon_phase(l - dw.left.radius) - ac.action;
            let mr = 2.0 * right.agmon_phase(l - dw.right.radius) - ac.action;
            push(&mut checks, CHECK_ERROR_LEFT, ml);
            push(&mut checks, CHECK_ERROR_RIGHT, mr);
        }
        Err(_) => {
            push(&mut checks, CHECK_ERROR_LEFT, f64::NAN);
            push(&mut checks, CHECK_ERROR_RIGHT, f64::NAN);
        }
    }
    Ok(GeometryReport { checks })
}
