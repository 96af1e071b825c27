//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
//! eigenvalues and inverse iteration for the eigenvectors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n - 1 entries");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |x| x.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.norm_bound().max(1.0);
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T - shift) x = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm_bound().max(f64::MIN_POSITIVE);
        // Row i holds (sub, diag, sup, sup2) after pivoting.
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut dl: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                x[i + 1] -= f * x[i];
                dl[i] = f;
            } else {
                // swap rows i and i+1
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                x.swap(i, i + 1);
                x[i + 1] -= f * x[i];
                dl[i] = f;
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        x[n - 1] /= d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }

    /// Unit eigenvector for the eigenvalue `lambda` and its residual history.
    pub fn eigenvector(&self, lambda: f64, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.len();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut history = Vec::new();
        for _ in 0..8 {
            let mut w = self.shifted_solve(lambda, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            w.iter_mut().for_each(|x| *x /= norm);
            v = w;
            let res = residual(self, &v, lambda);
            history.push(res);
            if res <= tol {
                return Ok((v, history));
            }
        }
        Err(Error::NoConvergence {
            iterations: history.len(),
            last: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }
}

impl SymTridiag {
    /// Recompute the decaying tail of an eigenvector by the inward ratio
    /// recursion, which is stable for the decaying solution. Inverse
    /// iteration leaves roundoff of relative size ε there, which swamps
    /// values below ~1e-16 of the peak.
    pub fn refine_tail(&self, lambda: f64, v: &mut [f64]) {
        let n = self.len();
        if n < 3 {
            return;
        }
        // s[j] = v[j+1] / v[j] with v[n] = 0.
        let mut s = vec![0.0; n];
        for j in (1..n).rev() {
            let back = -((self.diag[j] - lambda) + self.off.get(j).copied().unwrap_or(0.0) * s[j]) / self.off[j - 1];
            s[j - 1] = 1.0 / back;
        }
        // Start from the last entry that is still well above the noise.
        let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let peak = (0..n).rev().find(|&j| v[j].abs() >= 1e-3 * big).unwrap_or(0);
        if s[peak..n - 1].iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return;
        }
        for j in peak + 1..n {
            v[j] = v[j - 1] * s[j - 1];
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// ‖T v - λ v‖ for a unit vector v.
pub fn residual(t: &SymTridiag, v: &[f64], lambda: f64) -> f64 {
    t.apply(v)
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2cos(kπ/(n+1)).
        let n = 50;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            let got = t.eigenvalue(k);
            assert!((got - exact).abs() < 1e-14, "k={k}: {got} vs {exact}");
            let (v, _) = t.eigenvector(got, 1e-12).unwrap();
            assert!(residual(&t, &v, got) < 1e-12);
        }
    }

    #[test]
    fn matches_dense_solver() {
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 * 0.3 - 1.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.2 + ((i * 5) % 3) as f64 * 0.1).collect();
        let t = SymTridiag::new(diag.clone(), off.clone());
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = off[i];
                m[(i + 1, i)] = off[i];
            }
        }
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (k, e) in ev.iter().enumerate() {
            assert!((t.eigenvalue(k) - e).abs() < 1e-12);
        }
    }
}
