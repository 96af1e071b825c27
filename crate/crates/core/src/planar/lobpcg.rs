//! Block preconditioned conjugate-direction eigensolver (LOBPCG) with soft
//! locking, for the lowest eigenpairs of a `LinkOperator`.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LinkOperator;
use crate::error::{Error, Result};

pub const MAX_EIGENPAIRS: usize = 8;

type Block = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Preconditioner {
    None,
    /// Inverse diagonal. The diagonal of the link operator is constant, so
    /// this is only a rescaling.
    Jacobi,
    /// Sparse Cholesky solve with `L - σ`, where `σ = fraction·h·min B`
    /// stays below the spectrum.
    ShiftInvert { fraction: f64 },
}

impl Default for Preconditioner {
    fn default() -> Self {
        Preconditioner::ShiftInvert { fraction: 0.9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Relative residual `‖LΨ - λΨ‖/|λ|` required of every wanted pair.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub preconditioner: Preconditioner,
    /// Lower bound for the field, used to place the shift below the spectrum.
    pub min_field: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 2000,
            seed: 0x5eed,
            preconditioner: Preconditioner::default(),
            min_field: 0.0,
        }
    }
}

/// Eigenvalue and grid eigenfunction, normalized so that `δ² Σ |Ψ|² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair2D {
    pub lambda: f64,
    pub psi: Vec<Complex64>,
    /// `‖LΨ - λΨ‖ / |λ|`.
    pub residual: f64,
}

enum Precond {
    Scale(f64),
    Factor(faer::sparse::linalg::solvers::Llt<usize, Complex64>),
}

impl Precond {
    fn build(op: &LinkOperator, cfg: &SolveConfig) -> Result<Self> {
        match cfg.preconditioner {
            Preconditioner::None => Ok(Precond::Scale(1.0)),
            Preconditioner::Jacobi => Ok(Precond::Scale(1.0 / op.diagonal())),
            Preconditioner::ShiftInvert { fraction } => {
                let mut shift = fraction * op.h * cfg.min_field.max(0.0);
                // Halve the shift until the factorization certifies L - σ > 0.
                for _ in 0..8 {
                    if let Some(f) = factor(op, shift)? {
                        return Ok(Precond::Factor(f));
                    }
                    shift *= 0.5;
                }
                match factor(op, 0.0)? {
                    Some(f) => Ok(Precond::Factor(f)),
                    None => Err(Error::Inconsistent("link operator is not positive definite".into())),
                }
            }
        }
    }

    fn apply(&self, r: &mut Block) {
        match self {
            Precond::Scale(s) => r.iter_mut().for_each(|z| *z *= *s),
            Precond::Factor(f) => {
                let (rows, cols) = r.shape();
                let mat = MatMut::from_column_major_slice_mut(r.as_mut_slice(), rows, cols);
                f.solve_in_place(mat);
            }
        }
    }
}

fn factor(op: &LinkOperator, shift: f64) -> Result<Option<faer::sparse::linalg::solvers::Llt<usize, Complex64>>> {
    let n = op.len();
    let triplets: Vec<Triplet<usize, usize, Complex64>> = op
        .lower_triplets(shift)
        .into_iter()
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let mat = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Inconsistent(format!("sparse assembly failed: {e:?}")))?;
    Ok(mat.sp_cholesky(Side::Lower).ok())
}

fn apply_block(op: &LinkOperator, x: &Block) -> Block {
    let (rows, cols) = x.shape();
    let mut out = Block::zeros(rows, cols);
    for c in 0..cols {
        let src = &x.as_slice()[c * rows..(c + 1) * rows];
        let dst = &mut out.as_mut_slice()[c * rows..(c + 1) * rows];
        op.apply_into(src, dst);
    }
    out
}

/// Remove the span of the orthonormal `q` from `b` (twice, for stability).
fn project_out(b: &mut Block, q: &Block) {
    if q.ncols() == 0 || b.ncols() == 0 {
        return;
    }
    for _ in 0..2 {
        let c = q.adjoint() * &*b;
        *b -= q * c;
    }
}

/// Orthonormalize the columns of `b` against `q` and each other, dropping
/// columns that are numerically dependent.
fn orthonormalize_against(b: Block, q: &Block) -> Block {
    let mut b = b;
    for c in 0..b.ncols() {
        let norm = b.column(c).norm();
        if norm > 0.0 {
            b.column_mut(c).unscale_mut(norm);
        }
    }
    for _ in 0..2 {
        project_out(&mut b, q);
        if b.ncols() == 0 {
            return b;
        }
        let gram = b.adjoint() * &b;
        let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = gram.symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > 1e-14 * top.max(1e-300) && eig.eigenvalues[i] > 1e-20)
            .collect();
        let mut t = Block::zeros(b.ncols(), keep.len());
        for (out, &i) in keep.iter().enumerate() {
            let s = 1.0 / eig.eigenvalues[i].sqrt();
            t.set_column(out, &(eig.eigenvectors.column(i) * Complex64::new(s, 0.0)));
        }
        b = &b * t;
    }
    b
}

fn hstack(parts: &[&Block]) -> Block {
    let rows = parts.iter().map(|p| p.nrows()).max().unwrap_or(0);
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Block::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        if p.ncols() > 0 {
            out.columns_mut(at, p.ncols()).copy_from(*p);
            at += p.ncols();
        }
    }
    out
}

fn select_columns(b: &Block, idx: &[usize]) -> Block {
    let mut out = Block::zeros(b.nrows(), idx.len());
    for (o, &i) in idx.iter().enumerate() {
        out.set_column(o, &b.column(i));
    }
    out
}

/// The `k` lowest eigenpairs of `op`.
///
/// Starts from a seeded random block of `k + 2` vectors; converged columns
/// are soft-locked (kept in the Rayleigh-Ritz basis but no longer given
/// search directions). Fails with the residual history after `max_iter`
/// iterations.
pub fn lowest_eigenpairs(op: &LinkOperator, k: usize, cfg: &SolveConfig) -> Result<Vec<Eigenpair2D>> {
    if k == 0 || k > MAX_EIGENPAIRS {
        return Err(Error::InvalidParameter(format!("k = {k} must lie in 1..={MAX_EIGENPAIRS}")));
    }
    let n = op.len();
    let m = (k + 2).min(n);
    let precond = Precond::build(op, cfg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x0 = Block::from_fn(n, m, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let empty = Block::zeros(n, 0);
    let mut x = orthonormalize_against(x0, &empty);
    let (mut lambda, rotated) = rayleigh_ritz(op, &x, x.ncols());
    x = rotated;
    let mut p = Block::zeros(n, 0);
    let mut history = Vec::new();

    for iter in 0..cfg.max_iter {
        let ax = apply_block(op, &x);
        let mut r = &ax - &x * DMatrix::from_diagonal(&lambda.map(|l| Complex64::new(l, 0.0)));
        let res: Vec<f64> = (0..x.ncols()).map(|c| r.column(c).norm() / lambda[c].abs().max(f64::MIN_POSITIVE)).collect();
        let worst = res[..k].iter().cloned().fold(0.0, f64::max);
        history.push(worst);
        if worst <= cfg.tol {
            return Ok(finish(op, &x, &lambda, &res, k));
        }
        let active: Vec<usize> = (0..x.ncols()).filter(|&c| res[c] > cfg.tol).collect();
        r = select_columns(&r, &active);
        precond.apply(&mut r);
        let w = orthonormalize_against(r, &x);
        let xw = hstack(&[&x, &w]);
        let p_orth = orthonormalize_against(p.clone(), &xw);
        let s = hstack(&[&x, &w, &p_orth]);
        let (theta, c) = ritz_coefficients(op, &s);
        let mx = x.ncols();
        let c_x = c.columns(0, mx).into_owned();
        let new_x = &s * &c_x;
        // Conjugate directions: the part of the update outside span(X).
        let rest = s.columns(mx, s.ncols() - mx).into_owned();
        let c_rest = c_x.rows(mx, s.ncols() - mx).into_owned();
        let active_now: Vec<usize> = active.iter().copied().filter(|&i| i < mx).collect();
        p = &rest * select_columns(&c_rest, &active_now);
        x = new_x;
        lambda = nalgebra::DVector::from_iterator(mx, theta.iter().take(mx).copied());
        // Keep X orthonormal against slow drift.
        if iter % 25 == 24 {
            x = orthonormalize_against(x, &empty);
            if x.ncols() < mx {
                return Err(Error::NoConvergence {
                    iterations: iter + 1,
                    last: worst,
                    history,
                });
            }
            let (l, rot) = rayleigh_ritz(op, &x, mx);
            lambda = l;
            x = rot;
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        last: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Eigen-decomposition of the projected operator on the orthonormal basis `s`.
fn ritz_coefficients(op: &LinkOperator, s: &Block) -> (Vec<f64>, Block) {
    let as_ = apply_block(op, s);
    let h = s.adjoint() * as_;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let c = select_columns(&eig.eigenvectors, &order);
    (theta, c)
}

fn rayleigh_ritz(op: &LinkOperator, x: &Block, keep: usize) -> (nalgebra::DVector<f64>, Block) {
    let (theta, c) = ritz_coefficients(op, x);
    let keep = keep.min(theta.len());
    let lambda = nalgebra::DVector::from_iterator(keep, theta.into_iter().take(keep));
    (lambda, x * c.columns(0, keep))
}

fn finish(op: &LinkOperator, x: &Block, lambda: &nalgebra::DVector<f64>, res: &[f64], k: usize) -> Vec<Eigenpair2D> {
    let d = op.grid.spacing();
    (0..k)
        .map(|c| {
            let col = x.column(c);
            // Fix the global phase: largest entry real and positive.
            let big = col.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())).unwrap();
            let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) };
            let norm = col.norm();
            let psi = col.iter().map(|z| z * phase / (norm * d)).collect();
            Eigenpair2D {
                lambda: lambda[c],
                psi,
                residual: res[c],
            }
        })
        .collect()
}
