//! Backward-error measures for an approximate LS solution, and the dense
//! oracles used to check the iterative solvers.
//!
//! Everything here works on dense matrices and costs a full factorization
//! per call; none of it belongs on a per-iteration path.

mod qr;
mod svd;

pub use qr::{dense_ls_solve, dense_qr, DenseQr};
pub use svd::{dense_minnorm_solve, jacobi_svd, singular_values, Svd, JACOBI_MAX_SWEEPS, MINNORM_RCOND};

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linop::{DenseMatrix, LinearOperator};
use crate::vecops::{axpy, norm2};

/// `‖E₂‖ = ‖Aᵀr‖ / ‖r‖`. For `‖r‖ = 0` the value is 0 and `exact` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StewartE2 {
    pub value: f64,
    pub exact: bool,
}

pub fn stewart_e2(norm_atr: f64, norm_r: f64) -> StewartE2 {
    if norm_r == 0.0 {
        StewartE2 { value: 0.0, exact: true }
    } else {
        StewartE2 { value: norm_atr / norm_r, exact: false }
    }
}

/// `‖E₁‖ = ‖r − r̂‖ / ‖x‖`, plus whether `‖r‖² = ‖r̂‖² + ‖r − r̂‖²` held to
/// `1e-8` relative. A failed check means `r̂` is not an accurate LS residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StewartE1 {
    pub value: f64,
    pub pythagorean_ok: bool,
}

pub fn stewart_e1(x: &[f64], r: &[f64], r_hat: &[f64]) -> Result<StewartE1> {
    check_len(r.len(), r_hat.len())?;
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let mut e = r.to_vec();
    axpy(-1.0, r_hat, &mut e);
    let ne = norm2(&e);
    let (nr, nrh) = (norm2(r), norm2(r_hat));
    let lhs = nr * nr;
    let rhs = nrh * nrh + ne * ne;
    let pythagorean_ok = (lhs - rhs).abs() <= 1e-8 * lhs.max(rhs) || lhs.max(rhs) == 0.0;
    Ok(StewartE1 { value: ne / nx, pythagorean_ok })
}

/// `μ̃(x) = ‖K y‖ / ‖x‖` where `y` solves `min ‖K y − v‖`,
/// `K = [A; (‖r‖/‖x‖) I]`, `v = [r; 0]`, `r = b − A x`.
///
/// Returns 0 when `r = 0`.
pub fn optimal_backward_error(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Result<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    check_len(m, b.len())?;
    check_len(n, x.len())?;
    let nx = norm2(x);
    if nx == 0.0 {
        return Err(Error::ZeroSolution);
    }
    let mut r = b.to_vec();
    axpy(-1.0, &a.apply(x)?, &mut r);
    let nr = norm2(&r);
    if nr == 0.0 {
        return Ok(0.0);
    }
    let eta = nr / nx;
    let mut k = DenseMatrix::zeros(m + n, n);
    for i in 0..m {
        for j in 0..n {
            k.set(i, j, a.get(i, j));
        }
    }
    for j in 0..n {
        k.set(m + j, j, eta);
    }
    let mut v = r;
    v.resize(m + n, 0.0);
    let qr = dense_qr(&k)?;
    qr.apply_qt(&mut v)?;
    Ok(norm2(&v[..n]) / nx)
}

/// All three measures for one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardErrorReport {
    /// Needs the exact LS residual `r̂`.
    pub e1: Option<f64>,
    pub e2: f64,
    pub mu_tilde: f64,
}

/// Evaluates `E₁` (when `r_hat` is given), `E₂` and `μ̃` from true residuals.
pub fn backward_errors(a: &DenseMatrix, b: &[f64], x: &[f64], r_hat: Option<&[f64]>) -> Result<BackwardErrorReport> {
    check_len(a.ncols(), x.len())?;
    let mut r = b.to_vec();
    axpy(-1.0, &a.apply(x)?, &mut r);
    let atr = a.apply_adjoint(&r)?;
    let e2 = stewart_e2(norm2(&atr), norm2(&r)).value;
    let e1 = match r_hat {
        Some(rh) => Some(stewart_e1(x, &r, rh)?.value),
        None => None,
    };
    let mu_tilde = optimal_backward_error(a, b, x)?;
    Ok(BackwardErrorReport { e1, e2, mu_tilde })
}

/// Residual `b − M x_LS` of the minimum-norm LS solution, for `E₁`.
pub fn oracle_residual(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let x = dense_minnorm_solve(a, b)?;
    let mut r = b.to_vec();
    axpy(-1.0, &a.apply(&x)?, &mut r);
    Ok(r)
}
