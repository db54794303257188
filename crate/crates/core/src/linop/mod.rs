//! Linear operators: the only access the solvers have to `A`.
//!
//! An operator supplies accumulating products `y += A x` and `y += Aᵀ x`.
//! Accumulation lets the bidiagonalization update `v ← Aᵀu − βv` in place,
//! so no scratch n-vector is needed beyond the solver's own state.

mod csr;
mod dense;
mod scaling;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use scaling::{column_unit_scale, ScalingReport};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Result};

/// An `m × n` real operator with forward and adjoint products.
///
/// Implementations are immutable during products, so a single operator can
/// be shared by concurrent solves.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y += A x`. Callers guarantee `x.len() == ncols` and `y.len() == nrows`.
    fn forward_acc(&self, x: &[f64], y: &mut [f64]);

    /// `y += Aᵀ x`. Callers guarantee `x.len() == nrows` and `y.len() == ncols`.
    fn adjoint_acc(&self, x: &[f64], y: &mut [f64]);

    /// `y = A x`, overwriting `y`.
    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        self.forward_acc(x, y);
    }

    /// `y = Aᵀ x`, overwriting `y`.
    fn adjoint_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        self.adjoint_acc(x, y);
    }

    /// Checked forward product returning a fresh vector of length `nrows`.
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols(), v.len())?;
        let mut y = vec![0.0; self.nrows()];
        self.forward_acc(v, &mut y);
        Ok(y)
    }

    /// Checked adjoint product returning a fresh vector of length `ncols`.
    fn apply_adjoint(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.nrows(), u.len())?;
        let mut y = vec![0.0; self.ncols()];
        self.adjoint_acc(u, &mut y);
        Ok(y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn forward_acc(&self, x: &[f64], y: &mut [f64]) {
        (**self).forward_acc(x, y)
    }
    fn adjoint_acc(&self, x: &[f64], y: &mut [f64]) {
        (**self).adjoint_acc(x, y)
    }
    fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).forward_into(x, y)
    }
    fn adjoint_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).adjoint_into(x, y)
    }
}

/// The `n × n` identity.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn nrows(&self) -> usize {
        self.0
    }
    fn ncols(&self) -> usize {
        self.0
    }
    fn forward_acc(&self, x: &[f64], y: &mut [f64]) {
        crate::vecops::axpy(1.0, x, y);
    }
    fn adjoint_acc(&self, x: &[f64], y: &mut [f64]) {
        crate::vecops::axpy(1.0, x, y);
    }
}

/// The `m × n` zero map.
#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub nrows: usize,
    pub ncols: usize,
}

impl LinearOperator for Zero {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn forward_acc(&self, _x: &[f64], _y: &mut [f64]) {}
    fn adjoint_acc(&self, _x: &[f64], _y: &mut [f64]) {}
}

/// `[A; λI]`, the stacked operator of a Tikhonov-regularized problem.
#[derive(Debug, Clone, Copy)]
pub struct Augmented<Op> {
    pub inner: Op,
    pub lambda: f64,
}

impl<Op: LinearOperator> LinearOperator for Augmented<Op> {
    fn nrows(&self) -> usize {
        self.inner.nrows() + self.inner.ncols()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn forward_acc(&self, x: &[f64], y: &mut [f64]) {
        let (top, bottom) = y.split_at_mut(self.inner.nrows());
        self.inner.forward_acc(x, top);
        crate::vecops::axpy(self.lambda, x, bottom);
    }
    fn adjoint_acc(&self, x: &[f64], y: &mut [f64]) {
        let (top, bottom) = x.split_at(self.inner.nrows());
        self.inner.adjoint_acc(top, y);
        crate::vecops::axpy(self.lambda, bottom, y);
    }
}

/// Materializes any operator as a dense matrix by applying it to unit vectors.
pub fn to_dense<Op: LinearOperator + ?Sized>(op: &Op) -> DenseMatrix {
    let (m, n) = (op.nrows(), op.ncols());
    let mut out = DenseMatrix::zeros(m, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; m];
    for j in 0..n {
        e[j] = 1.0;
        op.forward_into(&e, &mut col);
        for (i, v) in col.iter().enumerate() {
            out.set(i, j, *v);
        }
        e[j] = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_products() {
        let id = Identity(3);
        assert_eq!(id.apply(&[1.0, 2.0, 3.0]).unwrap(), [1.0, 2.0, 3.0]);
        assert_eq!(Identity(2).apply_adjoint(&[1.0, 2.0]).unwrap(), [1.0, 2.0]);
    }

    #[test]
    fn zero_map() {
        let z = Zero { nrows: 2, ncols: 2 };
        assert_eq!(z.apply(&[5.0, 7.0]).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let id = Identity(3);
        assert_eq!(
            id.apply(&[1.0, 2.0]),
            Err(crate::Error::DimensionMismatch { expected: 3, found: 2 })
        );
        assert!(id.apply_adjoint(&[1.0; 4]).is_err());
    }

    #[test]
    fn augmented_stacks_lambda_identity() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let aug = Augmented { inner: &a, lambda: 0.5 };
        assert_eq!(aug.apply(&[1.0, 1.0]).unwrap(), [3.0, 3.0, 0.5, 0.5]);
        assert_eq!(
            aug.apply_adjoint(&[1.0, 1.0, 2.0, 4.0]).unwrap(),
            [2.0, 7.0]
        );
        let d = to_dense(&aug);
        assert_eq!(d.get(3, 1), 0.5);
        assert_eq!(d.get(3, 0), 0.0);
    }
}
