#![allow(dead_code)]

use lsmr_core::backerr::dense_qr;
use lsmr_core::linop::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(m, n, random_vec(rng, m * n))
}

/// `m × k` matrix with orthonormal columns.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, m: usize, k: usize) -> DenseMatrix {
    dense_qr(&random_dense(rng, m, k)).unwrap().thin_q()
}

/// `U diag(σ) Vᵀ` with `σ` log-spaced from 1 down to `1/cond` over the first
/// `rank` values and zero afterwards.
pub fn with_spectrum(rng: &mut ChaCha8Rng, m: usize, n: usize, cond: f64, rank: usize) -> DenseMatrix {
    let p = m.min(n);
    let u = random_orthonormal(rng, m, p);
    let v = random_orthonormal(rng, n, p);
    let mut us = u.clone();
    for j in 0..p {
        let s = if j >= rank {
            0.0
        } else if rank == 1 {
            1.0
        } else {
            cond.powf(-(j as f64) / (rank - 1) as f64)
        };
        for i in 0..m {
            us.set(i, j, u.get(i, j) * s);
        }
    }
    us.matmul(&v.transpose())
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}
