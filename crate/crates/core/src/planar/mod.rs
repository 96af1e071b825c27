//! Gauge-covariant discretization of `(ih∇ + A)²` on a square with
//! Dirichlet boundary.
//!
//! Every grid edge `j → k` carries the Peierls phase
//! `θ_jk = (1/h) ∫_j^k A·ds`, and
//!
//! ```text
//! (L u)_j = (h²/δ²) Σ_{k ~ j} (u_j - e^{-iθ_jk} u_k),
//! ```
//!
//! with missing (boundary) neighbours contributing `u_j`. The operator is
//! Hermitian for any real phases and transforms covariantly under
//! node-wise gauge changes, exactly as the continuum operator does.

mod lobpcg;

pub use lobpcg::{lowest_eigenpairs, Eigenpair2D, Preconditioner, SolveConfig};

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldSource, Gauge};
use crate::quad;

/// Minimal number of grid spacings per magnetic length.
pub const MIN_POINTS_PER_LENGTH: f64 = 8.0;
/// Default number of grid spacings per magnetic length.
pub const DEFAULT_POINTS_PER_LENGTH: f64 = 10.0;
/// Truncation margin beyond the wells, in magnetic lengths.
pub const MARGIN_LENGTHS: f64 = 6.0;

/// Square `[-W, W]²` with `n × n` nodes, `n` odd so that `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub half_width: f64,
    pub n: usize,
}

impl Grid2D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!("grid size n = {n} must be odd and ≥ 3")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half-width W = {half_width} must be > 0")));
        }
        Ok(Self { half_width, n })
    }

    /// Smallest box that clears every well by six magnetic lengths, with
    /// at least `points_per_length` spacings per magnetic length.
    pub fn for_source(source: &FieldSource, h: f64, points_per_length: f64) -> Result<Self> {
        let ell = (h / source.b1()).sqrt();
        let half_width = required_half_width(source, h);
        let cells = (2.0 * half_width * points_per_length / ell).ceil() as usize;
        let n = if cells % 2 == 0 { cells + 1 } else { cells + 2 };
        Self::new(half_width, n)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of node `(i, j)`, with `i` along `x₁`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        [self.coord(k % self.n), self.coord(k / self.n)]
    }

    /// Same box with the spacing halved (`n → 2n - 1`); old nodes are kept.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            n: 2 * self.n - 1,
        }
    }

    /// Check the resolution and truncation invariants for the given source and `h`.
    pub fn validate_for(&self, source: &FieldSource, h: f64) -> Result<()> {
        let ell = (h / source.b1()).sqrt();
        let limit = ell / MIN_POINTS_PER_LENGTH;
        if self.spacing() > limit * (1.0 + 1e-12) {
            return Err(Error::Resolution {
                spacing: self.spacing(),
                limit,
                magnetic_length: ell,
            });
        }
        let needed = required_half_width(source, h);
        if self.half_width < needed * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "half-width W = {} is below the required {} (wells plus {MARGIN_LENGTHS} magnetic lengths)",
                self.half_width, needed
            )));
        }
        Ok(())
    }
}

fn required_half_width(source: &FieldSource, h: f64) -> f64 {
    let ell = (h / source.b1()).sqrt();
    let reach = source
        .wells()
        .iter()
        .map(|(w, c)| c[0].abs().max(c[1].abs()) + w.spec().radius)
        .fold(0.0, f64::max);
    reach + MARGIN_LENGTHS * ell
}

/// Matrix-free magnetic Laplacian with Peierls phases.
#[derive(Debug, Clone)]
pub struct LinkOperator {
    pub grid: Grid2D,
    pub h: f64,
    /// Phase of edge `(i, j) → (i+1, j)` at `j·(n-1) + i`.
    pub theta_x: Vec<f64>,
    /// Phase of edge `(i, j) → (i, j+1)` at `j·n + i`.
    pub theta_y: Vec<f64>,
    link_x: Vec<Complex64>,
    link_y: Vec<Complex64>,
}

impl LinkOperator {
    /// Operator from explicit edge phases.
    pub fn from_phases(grid: Grid2D, h: f64, theta_x: Vec<f64>, theta_y: Vec<f64>) -> Result<Self> {
        let n = grid.n;
        if theta_x.len() != (n - 1) * n || theta_y.len() != n * (n - 1) {
            return Err(Error::InvalidParameter("edge phase arrays do not match the grid".into()));
        }
        let link_x = theta_x.iter().map(|t| Complex64::from_polar(1.0, -t)).collect();
        let link_y = theta_y.iter().map(|t| Complex64::from_polar(1.0, -t)).collect();
        Ok(Self {
            grid,
            h,
            theta_x,
            theta_y,
            link_x,
            link_y,
        })
    }

    /// `h²/δ²`.
    pub fn coupling(&self) -> f64 {
        let d = self.grid.spacing();
        self.h * self.h / (d * d)
    }

    /// Constant diagonal `4h²/δ²`.
    pub fn diagonal(&self) -> f64 {
        4.0 * self.coupling()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); u.len()];
        self.apply_into(u, &mut v);
        v
    }

    pub fn apply_into(&self, u: &[Complex64], v: &mut [Complex64]) {
        let n = self.grid.n;
        assert_eq!(u.len(), n * n, "grid function does not match the grid");
        let c = self.coupling();
        let diag = 4.0 * c;
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                let mut s = Complex64::new(0.0, 0.0);
                if i + 1 < n {
                    s += self.link_x[j * (n - 1) + i] * u[k + 1];
                }
                if i > 0 {
                    s += self.link_x[j * (n - 1) + i - 1].conj() * u[k - 1];
                }
                if j + 1 < n {
                    s += self.link_y[k] * u[k + n];
                }
                if j > 0 {
                    s += self.link_y[k - n].conj() * u[k - n];
                }
                v[k] = u[k] * diag - s * c;
            }
        }
    }

    /// Phase circulation around cell `(i, j)`–`(i+1, j+1)`, counter-clockwise.
    pub fn plaquette(&self, i: usize, j: usize) -> f64 {
        let n = self.grid.n;
        self.theta_x[j * (n - 1) + i] + self.theta_y[j * n + i + 1]
            - self.theta_x[(j + 1) * (n - 1) + i]
            - self.theta_y[j * n + i]
    }

    /// Entries of the lower triangle (row ≥ column) of `L - shift·I`.
    pub(crate) fn lower_triplets(&self, shift: f64) -> Vec<(usize, usize, Complex64)> {
        let n = self.grid.n;
        let c = self.coupling();
        let mut out = Vec::with_capacity(3 * n * n);
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                if j > 0 {
                    out.push((k, k - n, -c * self.link_y[k - n].conj()));
                }
                if i > 0 {
                    out.push((k, k - 1, -c * self.link_x[j * (n - 1) + i - 1].conj()));
                }
                out.push((k, k, Complex64::new(4.0 * c - shift, 0.0)));
            }
        }
        out
    }
}

/// Peierls operator for the field of `source` in the requested gauge.
///
/// Circular gauges describe one well only, so they are accepted for single
/// sources and rejected for double wells.
pub fn assemble_link_operator(source: &FieldSource, gauge: Gauge, grid: Grid2D, h: f64) -> Result<LinkOperator> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h = {h} must be > 0")));
    }
    grid.validate_for(source, h)?;
    let (tx, ty) = match (gauge, source) {
        (Gauge::LandauSeam, _) => seam_phases(source, &grid, h)?,
        (_, FieldSource::Single { .. }) => edge_quadrature_phases(source, gauge, &grid, h)?,
        (_, FieldSource::Double { .. }) => {
            return Err(Error::Inconsistent(
                "a circular gauge of one well does not carry the double-well field; use the seam gauge".into(),
            ))
        }
    };
    LinkOperator::from_phases(grid, h, tx, ty)
}

/// Horizontal edges carry no phase; vertical edges integrate
/// `A₂ = b1 x₁ - ∫₀^{x₁} (b1 - B)(u, s) du` at five Gauss points in `s`.
fn seam_phases(source: &FieldSource, grid: &Grid2D, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n;
    let d = grid.spacing();
    let b1 = source.b1();
    let centre = (n - 1) / 2;
    let theta_x = vec![0.0; (n - 1) * n];
    let mut theta_y = vec![0.0; n * (n - 1)];
    let mut deficit = vec![0.0; n];
    for j in 0..n - 1 {
        let (lo, hi) = (grid.coord(j), grid.coord(j + 1));
        let mut acc = vec![0.0; n];
        for g in 0..5 {
            let s = 0.5 * (lo + hi) + 0.5 * d * quad::GL5_NODES[g];
            cumulative_deficit(source, grid, s, centre, &mut deficit)?;
            for i in 0..n {
                acc[i] += quad::GL5_WEIGHTS[g] * deficit[i];
            }
        }
        for i in 0..n {
            let x1 = grid.coord(i);
            theta_y[j * n + i] = (b1 * x1 * d - 0.5 * d * acc[i]) / h;
        }
    }
    Ok((theta_x, theta_y))
}

/// `F(x_i) = ∫₀^{x_i} (b1 - B)(u, s) du` at every node, accumulated cell by
/// cell outward from the centre node.
fn cumulative_deficit(source: &FieldSource, grid: &Grid2D, s: f64, centre: usize, out: &mut [f64]) -> Result<()> {
    let n = grid.n;
    // Chords of the well discs cut by the line x₂ = s.
    let mut chords = Vec::new();
    for (well, c) in source.wells() {
        let dy = s - c[1];
        let a = well.spec().radius;
        if dy.abs() < a {
            let half = (a * a - dy * dy).sqrt();
            chords.push((c[0] - half, c[0] + half));
        }
    }
    let cell = |x0: f64, x1: f64| -> f64 {
        let mut total = 0.0;
        for &(ca, cb) in &chords {
            let (ia, ib) = (x0.max(ca), x1.min(cb));
            if ib > ia {
                total += quad::gauss_kronrod_15(&|u: f64| source.deficit_at([u, s]), ia, ib).value;
            }
        }
        total
    };
    out[centre] = 0.0;
    for i in centre + 1..n {
        out[i] = out[i - 1] + cell(grid.coord(i - 1), grid.coord(i));
    }
    for i in (0..centre).rev() {
        out[i] = out[i + 1] - cell(grid.coord(i), grid.coord(i + 1));
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Inconsistent("non-finite deficit integral".into()));
    }
    Ok(())
}

/// `(1/h) ∫ A·ds` along every edge by five-point Gauss quadrature.
fn edge_quadrature_phases(source: &FieldSource, gauge: Gauge, grid: &Grid2D, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n;
    let d = grid.spacing();
    let mut theta_x = vec![0.0; (n - 1) * n];
    let mut theta_y = vec![0.0; n * (n - 1)];
    for j in 0..n {
        for i in 0..n {
            let (x1, x2) = (grid.coord(i), grid.coord(j));
            if i + 1 < n {
                let mut s = 0.0;
                for g in 0..5 {
                    let u = x1 + 0.5 * d * (1.0 + quad::GL5_NODES[g]);
                    s += quad::GL5_WEIGHTS[g] * source.vector_potential(gauge, [u, x2])?[0];
                }
                theta_x[j * (n - 1) + i] = 0.5 * d * s / h;
            }
            if j + 1 < n {
                let mut s = 0.0;
                for g in 0..5 {
                    let v = x2 + 0.5 * d * (1.0 + quad::GL5_NODES[g]);
                    s += quad::GL5_WEIGHTS[g] * source.vector_potential(gauge, [x1, v])?[1];
                }
                theta_y[j * n + i] = 0.5 * d * s / h;
            }
        }
    }
    Ok((theta_x, theta_y))
}

/// `θ'_jk = θ_jk + (χ_k - χ_j)/h`; the spectrum is unchanged and
/// eigenvectors pick up the node-wise factor `e^{iχ/h}`.
pub fn gauge_transform(op: &LinkOperator, chi: &[f64]) -> Result<LinkOperator> {
    let n = op.grid.n;
    if chi.len() != n * n {
        return Err(Error::InvalidParameter("gauge function does not match the grid".into()));
    }
    let h = op.h;
    let mut tx = op.theta_x.clone();
    let mut ty = op.theta_y.clone();
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            if i + 1 < n {
                tx[j * (n - 1) + i] += (chi[k + 1] - chi[k]) / h;
            }
            if j + 1 < n {
                ty[k] += (chi[k + n] - chi[k]) / h;
            }
        }
    }
    LinkOperator::from_phases(op.grid, h, tx, ty)
}

/// `p(Ψ) = ∫_{x₁>0} |Ψ|²` on the grid, with the `x₁ = 0` column at half weight.
pub fn localization_fraction(psi: &[Complex64], grid: &Grid2D) -> f64 {
    let n = grid.n;
    let centre = (n - 1) / 2;
    let mut right = 0.0;
    let mut total = 0.0;
    for (k, z) in psi.iter().enumerate() {
        let w = z.norm_sqr();
        total += w;
        let i = k % n;
        if i > centre {
            right += w;
        } else if i == centre {
            right += 0.5 * w;
        }
    }
    right / total
}

/// Four-column CSV `x1,x2,re,im`.
pub fn write_eigenfunction_csv(path: &Path, grid: &Grid2D, psi: &[Complex64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x1", "x2", "re", "im"])?;
    for (k, z) in psi.iter().enumerate() {
        let p = grid.point(k);
        w.write_record(&[fmt(p[0]), fmt(p[1]), fmt(z.re), fmt(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// `|Ψ|²` as a whitespace-separated matrix, one row per `x₂` node, for heat maps.
pub fn write_density_map(path: &Path, grid: &Grid2D, psi: &[Complex64]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = grid.n;
    for j in 0..n {
        let row: Vec<String> = (0..n).map(|i| fmt(psi[j * n + i].norm_sqr())).collect();
        writeln!(f, "{}", row.join(" "))?;
    }
    f.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ProfileKind, RadialFieldSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn well_source(depth: f64) -> FieldSource {
        let spec = RadialFieldSpec::new(1.0, 1.0, depth, ProfileKind::SmoothBump).unwrap();
        FieldSource::single(&spec, [0.0, 0.0]).unwrap()
    }

    fn random_field(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
    }

    #[test]
    fn zero_phases_give_scaled_laplacian() {
        let grid = Grid2D::new(1.0, 9).unwrap();
        let op = LinkOperator::from_phases(grid, 0.3, vec![0.0; 72], vec![0.0; 72]).unwrap();
        let v = op.apply(&vec![Complex64::new(1.0, 0.0); 81]);
        for j in 0..9 {
            for i in 0..9 {
                let missing = [i == 0, i == 8, j == 0, j == 8].iter().filter(|&&b| b).count();
                let expect = missing as f64 * op.coupling();
                assert!((v[grid.index(i, j)].re - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_field_seam_phases_are_linear() {
        let src = well_source(0.0);
        let h = 0.1;
        let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
        let op = assemble_link_operator(&src, Gauge::LandauSeam, grid, h).unwrap();
        let d = grid.spacing();
        assert!(op.theta_x.iter().all(|&t| t == 0.0));
        for j in 0..grid.n - 1 {
            for i in 0..grid.n {
                let expect = grid.coord(i) * d / h;
                assert!((op.theta_y[j * grid.n + i] - expect).abs() < 1e-13);
            }
        }
    }

    fn cell_flux(src: &FieldSource, x0: f64, y0: f64, d: f64) -> f64 {
        let inner = |y: f64| quad::integrate(|x| src.field_at([x, y]), x0, x0 + d, 1e-16, 1e-14).unwrap();
        quad::integrate(inner, y0, y0 + d, 1e-16, 1e-14).unwrap()
    }

    fn check_plaquettes(src: &FieldSource, gauge: Gauge, seed: u64) {
        let h = 0.1;
        let grid = Grid2D::for_source(src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
        let op = assemble_link_operator(src, gauge, grid, h).unwrap();
        let d = grid.spacing();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Cells drawn from the well region, where the field varies.
        let reach = ((1.2 + grid.half_width) / d) as usize;
        let lo = grid.n / 2 - (reach - grid.n / 2).min(grid.n / 2 - 1);
        for _ in 0..100 {
            let i = rng.gen_range(lo..grid.n - lo);
            let j = rng.gen_range(lo..grid.n - lo);
            let flux = cell_flux(src, grid.coord(i), grid.coord(j), d);
            let got = h * op.plaquette(i, j);
            assert!((got - flux).abs() <= 1e-10 * flux.abs(), "cell ({i},{j}): {got} vs {flux}");
        }
    }

    #[test]
    fn seam_plaquettes_carry_the_flux() {
        check_plaquettes(&well_source(0.5), Gauge::LandauSeam, 7);
    }

    #[test]
    fn circular_plaquettes_carry_the_flux() {
        check_plaquettes(&well_source(0.5), Gauge::CircularLeft, 8);
    }

    #[test]
    fn hermitian_and_linear() {
        let src = well_source(0.5);
        let h = 0.2;
        let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
        let op = assemble_link_operator(&src, Gauge::LandauSeam, grid, h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (u, w) = (random_field(op.len(), &mut rng), random_field(op.len(), &mut rng));
        let (lu, lw) = (op.apply(&u), op.apply(&w));
        let lhs = dot(&lu, &w);
        let rhs = dot(&u, &lw);
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4));
        let mix: Vec<Complex64> = u.iter().zip(&w).map(|(x, y)| a * x + b * y).collect();
        let lmix = op.apply(&mix);
        let scale = lu.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..op.len() {
            assert!((lmix[k] - (a * lu[k] + b * lw[k])).norm() <= 1e-14 * scale);
        }
    }

    #[test]
    fn constant_gauge_is_bitwise_identity() {
        let src = well_source(0.5);
        let h = 0.2;
        let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
        let op = assemble_link_operator(&src, Gauge::LandauSeam, grid, h).unwrap();
        let op2 = gauge_transform(&op, &vec![0.37; op.len()]).unwrap();
        assert_eq!(op.theta_x, op2.theta_x);
        assert_eq!(op.theta_y, op2.theta_y);
        assert!(gauge_transform(&op, &[0.0; 3]).is_err());
    }

    #[test]
    fn circular_gauge_rejected_for_double_wells() {
        let w = RadialFieldSpec::new(1.0, 0.45, 0.5, ProfileKind::SmoothBump).unwrap();
        let dw = crate::fields::DoubleWellSpec::symmetric(w, 2.1).unwrap();
        let src = FieldSource::double(&dw).unwrap();
        let grid = Grid2D::for_source(&src, 0.2, DEFAULT_POINTS_PER_LENGTH).unwrap();
        assert!(matches!(
            assemble_link_operator(&src, Gauge::CircularRight, grid, 0.2),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn coarse_grid_names_spacing_and_length() {
        let src = well_source(0.5);
        let grid = Grid2D::for_source(&src, 0.1, 4.0).unwrap();
        match assemble_link_operator(&src, Gauge::LandauSeam, grid, 0.1) {
            Err(Error::Resolution { spacing, magnetic_length, .. }) => {
                assert!(spacing > magnetic_length / MIN_POINTS_PER_LENGTH);
                assert!((magnetic_length - 0.1f64.sqrt()).abs() < 1e-15);
            }
            other => panic!("expected a resolution error, got {other:?}"),
        }
        assert!(Grid2D::new(1.0, 10).is_err());
    }

    #[test]
    fn localization_fraction_examples() {
        let grid = Grid2D::new(1.0, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut psi = vec![Complex64::new(0.0, 0.0); grid.len()];
        for j in 0..11 {
            for i in 0..=5 {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                psi[grid.index(i, j)] = z;
                psi[grid.index(10 - i, j)] = z * Complex64::new(0.0, 1.0);
            }
        }
        assert!((localization_fraction(&psi, &grid) - 0.5).abs() < 1e-12);
        for j in 0..11 {
            for i in 0..=5 {
                psi[grid.index(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        assert_eq!(localization_fraction(&psi, &grid), 1.0);
    }

    #[test]
    fn csv_export_round_trips() {
        let grid = Grid2D::new(1.0, 3).unwrap();
        let psi: Vec<Complex64> = (0..9).map(|k| Complex64::new(k as f64, -0.5)).collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("psi.csv");
        write_eigenfunction_csv(&p, &grid, &psi).unwrap();
        let mut r = csv::Reader::from_path(&p).unwrap();
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[4][2].parse::<f64>().unwrap(), 4.0);
        let m = dir.path().join("rho.dat");
        write_density_map(&m, &grid, &psi).unwrap();
        assert_eq!(std::fs::read_to_string(&m).unwrap().lines().count(), 3);
    }
}
