//! Seeded synthetic least-squares problems with a prescribed singular spectrum.

use lsmr_core::backerr::dense_qr;
use lsmr_core::{CsrMatrix, DenseMatrix, LinearOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub rows: usize,
    pub cols: usize,
    /// Ratio of the largest to the smallest nonzero singular value.
    pub cond: f64,
    /// Number of nonzero singular values; `None` means `min(rows, cols)`.
    pub rank: Option<usize>,
    /// Build `b` in the range of `A`.
    pub consistent: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub sigma: Vec<f64>,
}

fn gaussian(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(m, n, (0..m * n).map(|_| StandardNormal.sample(rng)).collect())
}

/// `A = U diag(σ) Vᵀ` with Haar-like orthonormal `U`, `V` and `σ`
/// log-spaced from 1 down to `1/cond` over the first `rank` values.
pub fn generate(spec: &ProblemSpec) -> Result<Problem> {
    let (m, n) = (spec.rows, spec.cols);
    if m == 0 || n == 0 {
        return Err(CliError::Usage("rows and cols must be positive".into()));
    }
    let p = m.min(n);
    let rank = spec.rank.unwrap_or(p);
    if rank == 0 || rank > p {
        return Err(CliError::Usage(format!("rank must lie in 1..={p}")));
    }
    if !(spec.cond >= 1.0 && spec.cond.is_finite()) {
        return Err(CliError::Usage("cond must be finite and at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = dense_qr(&gaussian(&mut rng, m, p))?.thin_q();
    let v = dense_qr(&gaussian(&mut rng, n, p))?.thin_q();
    let sigma: Vec<f64> = (0..p)
        .map(|j| match j {
            _ if j >= rank => 0.0,
            _ if rank == 1 => 1.0,
            _ => spec.cond.powf(-(j as f64) / (rank - 1) as f64),
        })
        .collect();
    let mut us = u;
    for j in 0..p {
        for i in 0..m {
            us.set(i, j, us.get(i, j) * sigma[j]);
        }
    }
    let a = us.matmul(&v.transpose());
    let b = if spec.consistent {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        a.apply(&x)?
    } else {
        (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
    };
    Ok(Problem { a, b, sigma })
}

impl Problem {
    pub fn csr(&self) -> CsrMatrix {
        CsrMatrix::from_dense(&self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lsmr_core::backerr::{dense_minnorm_solve, singular_values};

    fn spec(rank: Option<usize>, consistent: bool) -> ProblemSpec {
        ProblemSpec { rows: 20, cols: 10, cond: 1e3, rank, consistent, seed: 42 }
    }

    #[test]
    fn deterministic() {
        let p1 = generate(&spec(None, false)).unwrap();
        let p2 = generate(&spec(None, false)).unwrap();
        assert_eq!(p1.a, p2.a);
        assert_eq!(p1.b, p2.b);
    }

    #[test]
    fn spectrum_and_rank() {
        let p = generate(&spec(None, false)).unwrap();
        let s = singular_values(&p.a).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[0] / s[9] - 1e3).abs() < 1e-6);
        let p = generate(&spec(Some(5), false)).unwrap();
        let s = singular_values(&p.a).unwrap();
        assert_eq!(s.iter().filter(|&&v| v > 1e-10 * s[0]).count(), 5);
    }

    #[test]
    fn consistent_rhs_has_zero_ls_residual() {
        let p = generate(&spec(Some(6), true)).unwrap();
        let x = dense_minnorm_solve(&p.a, &p.b).unwrap();
        let ax = p.a.apply(&x).unwrap();
        let r: f64 = ax.iter().zip(&p.b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(r <= 1e-10);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&ProblemSpec { rank: Some(11), ..spec(None, false) }).is_err());
        assert!(generate(&ProblemSpec { cond: 0.5, ..spec(None, false) }).is_err());
        assert!(generate(&ProblemSpec { rows: 0, ..spec(None, false) }).is_err());
    }
}
