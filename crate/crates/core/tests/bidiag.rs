mod common;

use common::*;
use lsmr_core::gk::{gk_init, reorthogonalize, GkState, ReorthMode, DEFAULT_REORTH_CAP};
use lsmr_core::linop::{CsrMatrix, DenseMatrix, LinearOperator};
use proptest::prelude::*;

fn gram_err(vs: &[Vec<f64>]) -> f64 {
    let mut w = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            w = w.max((d - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    w
}

type Run = (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>);

/// Runs up to `steps` steps, collecting `u₁..u_{k+1}`, `v₁..v_k` and the `(α, β)` stream.
fn run(a: &DenseMatrix, b: &[f64], mode: ReorthMode, steps: usize) -> Run {
    let (beta1, mut st): (f64, GkState) = gk_init(a, b, mode, DEFAULT_REORTH_CAP).unwrap();
    let mut us = vec![st.u().to_vec()];
    let mut vs = vec![st.v().to_vec()];
    let mut alphas = vec![st.alpha()];
    let mut betas = vec![beta1];
    for _ in 0..steps {
        if !st.is_active() {
            break;
        }
        let (beta, alpha) = st.step(a).unwrap();
        if beta == 0.0 {
            break;
        }
        us.push(st.u().to_vec());
        betas.push(beta);
        if alpha == 0.0 {
            break;
        }
        vs.push(st.v().to_vec());
        alphas.push(alpha);
    }
    (us, vs, alphas, betas)
}

#[test]
fn bidiagonal_relation_holds_without_reorth() {
    for seed in 0..5u64 {
        let mut r = rng(seed);
        let a = random_dense(&mut r, 25, 15);
        let b = random_vec(&mut r, 25);
        let (us, vs, alphas, betas) = run(&a, &b, ReorthMode::None, 10);
        let k = 10;
        // A V_k = U_{k+1} B_k, column by column: A v_j = α_j u_j + β_{j+1} u_{j+1}.
        for j in 0..k {
            let av = a.apply(&vs[j]).unwrap();
            for i in 0..25 {
                let rhs = alphas[j] * us[j][i] + betas[j + 1] * us[j + 1][i];
                assert!((av[i] - rhs).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn full_reorth_keeps_both_bases_orthonormal() {
    let mut r = rng(11);
    let a = with_spectrum(&mut r, 30, 20, 1e8, 20);
    let b = random_vec(&mut r, 30);
    let (beta1, mut st) = gk_init(&a, &b, ReorthMode::Both, DEFAULT_REORTH_CAP).unwrap();
    assert!(beta1 > 0.0);
    while st.is_active() && st.k() < 20 {
        st.step(&a).unwrap();
    }
    let us: Vec<Vec<f64>> = st.stored_u().map(<[f64]>::to_vec).collect();
    let vs: Vec<Vec<f64>> = st.stored_v().map(<[f64]>::to_vec).collect();
    assert!(gram_err(&us) <= 1e-12);
    assert!(gram_err(&vs) <= 1e-12);
}

#[test]
fn v_reorth_keeps_u_orthonormal_to_sqrt_eps() {
    let mut r = rng(60);
    let a = with_spectrum(&mut r, 60, 30, 1e8, 30);
    let b = random_vec(&mut r, 60);
    let (us, vs, ..) = run(&a, &b, ReorthMode::VOnly, 30);
    assert!(gram_err(&vs[..vs.len().min(30)]) <= 1e-12);
    assert!(gram_err(&us[..us.len().min(30)]) <= 1e-6);
}

#[test]
fn u_reorth_keeps_v_orthonormal_to_sqrt_eps() {
    let mut r = rng(61);
    let a = with_spectrum(&mut r, 60, 30, 1e8, 30);
    let b = random_vec(&mut r, 60);
    let (_, vs, ..) = run(&a, &b, ReorthMode::UOnly, 30);
    assert!(gram_err(&vs[..vs.len().min(30)]) <= 1e-6);
}

#[test]
fn local_window_never_exceeds_its_size() {
    let mut r = rng(5);
    let a = random_dense(&mut r, 40, 20);
    let b = random_vec(&mut r, 40);
    let (_, mut st) = gk_init(&a, &b, ReorthMode::Local(4), DEFAULT_REORTH_CAP).unwrap();
    while st.is_active() && st.k() < 20 {
        st.step(&a).unwrap();
        assert!(st.stored_v().count() <= 4);
        assert_eq!(st.stored_u().count(), 0);
    }
}

#[test]
fn reorthogonalize_removes_span_components() {
    let mut r = rng(9);
    let q = random_orthonormal(&mut r, 12, 5);
    let basis: Vec<Vec<f64>> = (0..5).map(|j| q.column(j)).collect();
    let refs: Vec<&[f64]> = basis.iter().map(Vec::as_slice).collect();
    let coef = random_vec(&mut r, 5);
    let mut w = vec![0.0; 12];
    for (c, v) in coef.iter().zip(&basis) {
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi += c * vi;
        }
    }
    let out = reorthogonalize(&w, &refs, 2);
    assert!(norm(&out) <= 1e-12 * norm(&w));
}

fn random_csr(r: &mut rand_chacha::ChaCha8Rng, m: usize, n: usize) -> CsrMatrix {
    use rand::Rng;
    let trips: Vec<(usize, usize, f64)> = (0..(m * n) / 2)
        .map(|_| (r.random_range(0..m), r.random_range(0..n), r.random_range(-1.0..1.0)))
        .collect();
    CsrMatrix::from_triplets(m, n, trips).unwrap()
}

proptest! {
    #[test]
    fn adjoint_is_consistent(seed in any::<u64>(), m in 1usize..20, n in 1usize..20) {
        let mut r = rng(seed);
        let csr = random_csr(&mut r, m, n);
        let dense = random_dense(&mut r, m, n);
        let v = random_vec(&mut r, n);
        let u = random_vec(&mut r, m);
        let ops: [(&dyn LinearOperator, f64); 2] = [(&csr, csr.frobenius_norm()), (&dense, dense.frobenius_norm())];
        for (op, fro) in ops {
            let av = op.apply(&v).unwrap();
            let atu = op.apply_adjoint(&u).unwrap();
            prop_assert_eq!(av.len(), m);
            prop_assert_eq!(atu.len(), n);
            let lhs: f64 = av.iter().zip(&u).map(|(a, b)| a * b).sum();
            let rhs: f64 = v.iter().zip(&atu).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - rhs).abs() <= 100.0 * f64::EPSILON * fro * norm(&v) * norm(&u));
        }
    }

    #[test]
    fn gk_vectors_are_unit_and_scalars_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_dense(&mut r, 15, 8);
        let b = random_vec(&mut r, 15);
        let (beta1, mut st) = gk_init(&a, &b, ReorthMode::None, DEFAULT_REORTH_CAP).unwrap();
        prop_assert!(beta1 >= 0.0);
        for _ in 0..6 {
            if !st.is_active() { break; }
            let (beta, alpha) = st.step(&a).unwrap();
            prop_assert!(beta >= 0.0 && alpha >= 0.0);
            if st.is_active() {
                prop_assert!((norm(st.u()) - 1.0).abs() <= 4.0 * f64::EPSILON);
                prop_assert!((norm(st.v()) - 1.0).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn csr_matches_dense_backend(seed in any::<u64>(), m in 1usize..12, n in 1usize..12) {
        let mut r = rng(seed);
        let csr = random_csr(&mut r, m, n);
        let dense = csr.to_dense();
        let v = random_vec(&mut r, n);
        let u = random_vec(&mut r, m);
        let d1 = rel_diff(&csr.apply(&v).unwrap(), &dense.apply(&v).unwrap());
        let d2 = rel_diff(&csr.apply_adjoint(&u).unwrap(), &dense.apply_adjoint(&u).unwrap());
        prop_assert!(d1 <= 1e-14 || dense.frobenius_norm() == 0.0);
        prop_assert!(d2 <= 1e-14 || dense.frobenius_norm() == 0.0);
    }
}
