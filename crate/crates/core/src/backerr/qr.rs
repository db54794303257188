//! Householder QR with a nonnegative diagonal in `R`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linop::DenseMatrix;
use crate::math::sqrt;
use crate::vecops::{dot, norm2};

/// `M = QR` for `m ≥ n`, with `Q` kept as `n` Householder reflectors.
#[derive(Debug, Clone)]
pub struct DenseQr {
    m: usize,
    n: usize,
    // Column j holds the reflector v_j (v_j[j] = 1 implied) below the diagonal.
    reflectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
    r: DenseMatrix,
}

// Computes (v, β) with (I − β v vᵀ) x = ‖x‖ e₁ and v[0] = 1.
fn house(x: &[f64]) -> (Vec<f64>, f64) {
    let mut v = x.to_vec();
    v[0] = 1.0;
    let sigma = dot(&x[1..], &x[1..]);
    let x0 = x[0];
    if sigma == 0.0 {
        return if x0 >= 0.0 { (v, 0.0) } else { (v, 2.0) };
    }
    let mu = sqrt(x0 * x0 + sigma);
    let v0 = if x0 <= 0.0 { x0 - mu } else { -sigma / (x0 + mu) };
    let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for vi in &mut v[1..] {
        *vi /= v0;
    }
    (v, beta)
}

/// Householder QR of `M` (`nrows ≥ ncols`).
pub fn dense_qr(mat: &DenseMatrix) -> Result<DenseQr> {
    let (m, n) = (mat.nrows(), mat.ncols());
    if m < n {
        return Err(Error::InvalidMatrix("QR needs nrows >= ncols"));
    }
    // Column-major working copy.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| mat.column(j)).collect();
    let mut reflectors = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    for j in 0..n {
        let (v, beta) = house(&cols[j][j..]);
        for col in cols.iter_mut().skip(j) {
            let tail = &mut col[j..];
            let w = beta * dot(&v, tail);
            for (t, vi) in tail.iter_mut().zip(&v) {
                *t -= w * vi;
            }
        }
        // Exact zeros below the diagonal.
        for t in &mut cols[j][j + 1..] {
            *t = 0.0;
        }
        reflectors.push(v);
        betas.push(beta);
    }
    let mut r = DenseMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..=j {
            r.set(i, j, col[i]);
        }
    }
    Ok(DenseQr { m, n, reflectors, betas, r })
}

impl DenseQr {
    /// The `n × n` upper-triangular factor.
    pub fn r(&self) -> &DenseMatrix {
        &self.r
    }

    /// `y ← Qᵀ y` for a length-`m` vector, with `Q` the full `m × m` factor.
    pub fn apply_qt(&self, y: &mut [f64]) -> Result<()> {
        check_len(self.m, y.len())?;
        for (j, (v, beta)) in self.reflectors.iter().zip(&self.betas).enumerate() {
            let tail = &mut y[j..];
            let w = beta * dot(v, tail);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= w * vi;
            }
        }
        Ok(())
    }

    /// `y ← Q y`.
    pub fn apply_q(&self, y: &mut [f64]) -> Result<()> {
        check_len(self.m, y.len())?;
        for (j, (v, beta)) in self.reflectors.iter().zip(&self.betas).enumerate().rev() {
            let tail = &mut y[j..];
            let w = beta * dot(v, tail);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= w * vi;
            }
        }
        Ok(())
    }

    /// The thin `m × n` orthonormal factor.
    pub fn thin_q(&self) -> DenseMatrix {
        let mut q = DenseMatrix::zeros(self.m, self.n);
        let mut e = vec![0.0; self.m];
        for j in 0..self.n {
            e.fill(0.0);
            e[j] = 1.0;
            self.apply_q(&mut e).expect("length m");
            for (i, v) in e.iter().enumerate() {
                q.set(i, j, *v);
            }
        }
        q
    }

    /// Solves `R x = c[..n]` by back substitution. A diagonal with
    /// `|R_jj| ≤ tol` is reported as singular.
    pub fn solve_r(&self, c: &[f64], tol: f64) -> Result<Vec<f64>> {
        let n = self.n;
        let mut x = c[..n].to_vec();
        for j in (0..n).rev() {
            let d = self.r.get(j, j);
            if d.abs() <= tol {
                return Err(Error::Singular { index: j });
            }
            x[j] /= d;
            let xj = x[j];
            for (i, xi) in x.iter_mut().enumerate().take(j) {
                *xi -= self.r.get(i, j) * xj;
            }
        }
        Ok(x)
    }
}

/// Least-squares solution of `min ‖M x − rhs‖` for full column rank `M`.
pub fn dense_ls_solve(mat: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(mat.nrows(), rhs.len())?;
    let qr = dense_qr(mat)?;
    let mut c = rhs.to_vec();
    qr.apply_qt(&mut c)?;
    let x = qr.solve_r(&c, 1e-14 * mat.frobenius_norm())?;
    debug_assert!(normal_equation_ok(mat, rhs, &x), "dense LS oracle failed its normal-equation check");
    Ok(x)
}

fn normal_equation_ok(mat: &DenseMatrix, rhs: &[f64], x: &[f64]) -> bool {
    use crate::linop::LinearOperator;
    let mut r = rhs.to_vec();
    let ax = mat.apply(x).expect("dims");
    for (ri, axi) in r.iter_mut().zip(&ax) {
        *ri -= axi;
    }
    let g = norm2(&mat.apply_adjoint(&r).expect("dims"));
    let f = mat.frobenius_norm();
    g <= 1e-10 * f * f * norm2(x) + 1e-10 * f * norm2(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut s = seed;
        let data = (0..m * n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        DenseMatrix::from_row_major(m, n, data)
    }

    #[test]
    fn identity_gives_identity() {
        let qr = dense_qr(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(qr.r().max_abs_diff(&DenseMatrix::identity(4)), 0.0);
    }

    #[test]
    fn column_norm_on_diagonal() {
        let qr = dense_qr(&DenseMatrix::from_rows(&[&[3.0], &[4.0]])).unwrap();
        assert!((qr.r().get(0, 0) - 5.0).abs() < 1e-15);
        let qr = dense_qr(&DenseMatrix::from_rows(&[&[-3.0], &[-4.0]])).unwrap();
        assert!((qr.r().get(0, 0) - 5.0).abs() < 1e-15);
        let qr = dense_qr(&DenseMatrix::from_rows(&[&[-2.0], &[0.0]])).unwrap();
        assert!((qr.r().get(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_and_orthogonality() {
        let m = lcg_matrix(20, 8, 7);
        let qr = dense_qr(&m).unwrap();
        let q = qr.thin_q();
        let back = q.matmul(qr.r());
        let f = m.frobenius_norm();
        let mut diff = 0.0;
        for i in 0..20 {
            for j in 0..8 {
                let d = back.get(i, j) - m.get(i, j);
                diff += d * d;
            }
        }
        assert!(diff.sqrt() <= 1e-12 * f);
        let qtq = q.transpose().matmul(&q);
        assert!(qtq.max_abs_diff(&DenseMatrix::identity(8)) <= 1e-13 * 8.0);
        for j in 0..8 {
            assert!(qr.r().get(j, j) >= 0.0);
        }
    }

    #[test]
    fn ls_examples() {
        let x = dense_ls_solve(&DenseMatrix::identity(3), &[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.0]);
        let x = dense_ls_solve(&DenseMatrix::from_rows(&[&[1.0], &[1.0]]), &[2.0, 0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        assert!(matches!(dense_ls_solve(&m, &[1.0, 1.0, 1.0]), Err(Error::Singular { index: 1 })));
    }

    #[test]
    fn wide_rejected() {
        assert!(dense_qr(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
