//! One-sided Jacobi SVD and the minimum-norm least-squares solve built on it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linop::DenseMatrix;
use crate::math::sqrt;
use crate::vecops::{dot, norm2};

/// Sweep cap for [`jacobi_svd`].
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Relative threshold below which singular values are treated as zero.
pub const MINNORM_RCOND: f64 = 1e-12;

/// Thin SVD `M = U diag(σ) Vᵀ` with `σ` sorted descending, `p = min(m, n)` terms.
///
/// Singular vectors on the short side that belong to `σ = 0` are left as zero
/// columns; the long-side ones always form an orthonormal set.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    /// Number of singular values above `rel · σ_max`.
    pub fn rank(&self, rel: f64) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel * smax).count()
    }

    /// `σ_max / σ_min` over the nonzero part selected by `rel`.
    pub fn cond(&self, rel: f64) -> f64 {
        let r = self.rank(rel);
        if r == 0 {
            return f64::INFINITY;
        }
        self.sigma[0] / self.sigma[r - 1]
    }
}

// Orthogonalizes the columns of `w` (each of length `len`), accumulating the
// rotations into `acc`. Returns the number of sweeps used.
fn hestenes(w: &mut [Vec<f64>], acc: &mut [Vec<f64>], fro: f64) -> Result<usize> {
    let p = w.len();
    let negligible = 1e-14 * fro;
    for sweep in 1..=JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let a = dot(&w[i], &w[i]);
                let b = dot(&w[j], &w[j]);
                if sqrt(a) <= negligible || sqrt(b) <= negligible {
                    continue;
                }
                let g = dot(&w[i], &w[j]);
                if g.abs() <= 1e-14 * sqrt(a * b) {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(w, i, j, c, s);
                rotate(acc, i, j, c, s);
            }
        }
        if !rotated {
            return Ok(sweep);
        }
    }
    Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS })
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
        let (xi, yi) = (*x, *y);
        *x = c * xi - s * yi;
        *y = s * xi + c * yi;
    }
}

/// SVD by one-sided Jacobi rotations on the columns of `M` (or of `Mᵀ` when
/// `M` is wide). Fails with [`Error::NoConvergence`] after
/// [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn jacobi_svd(mat: &DenseMatrix) -> Result<Svd> {
    let wide = mat.nrows() < mat.ncols();
    let work = if wide { mat.transpose() } else { mat.clone() };
    let (m, n) = (work.nrows(), work.ncols());
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    let mut acc: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    hestenes(&mut w, &mut acc, mat.frobenius_norm())?;

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Left vectors of `work` are w_j / σ_j, right vectors the accumulated columns.
    let mut left = DenseMatrix::zeros(m, n);
    let mut right = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (col, &(s, j)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..m {
            left.set(i, col, if s > 0.0 { w[j][i] / s } else { 0.0 });
        }
        for i in 0..n {
            right.set(i, col, acc[j][i]);
        }
    }
    let (u, v) = if wide { (right, left) } else { (left, right) };
    Ok(Svd { u, sigma, v })
}

/// `x = M⁺ rhs`, dropping singular values below `1e-12 · σ_max`.
pub fn dense_minnorm_solve(mat: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(mat.nrows(), rhs.len())?;
    let svd = jacobi_svd(mat)?;
    let n = mat.ncols();
    let mut x = vec![0.0; n];
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(x);
    }
    for (k, &s) in svd.sigma.iter().enumerate() {
        if s <= MINNORM_RCOND * smax {
            break;
        }
        let coef = (0..mat.nrows()).map(|i| svd.u.get(i, k) * rhs[i]).sum::<f64>() / s;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * svd.v.get(j, k);
        }
    }
    Ok(x)
}

/// Singular values of `M`, descending.
pub fn singular_values(mat: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_svd(mat)?.sigma)
}
