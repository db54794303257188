mod common;

use common::*;
use lsmr_core::backerr::singular_values;
use lsmr_core::gk::ReorthMode;
use lsmr_core::linop::{DenseMatrix, Identity, LinearOperator};
use lsmr_core::lsmr::{lsmr_solve, IterationRecord, Lsmr, SolveOptions};
use rand::Rng;

fn tight(reorth: ReorthMode, lambda: f64) -> SolveOptions {
    SolveOptions { atol: 1e-14, btol: 1e-14, lambda, reorth, diagnostics: true, ..Default::default() }
}

/// Runs a diagnostic solve and returns every trace row with its iterate.
fn trace(a: &DenseMatrix, b: &[f64], opts: &SolveOptions) -> Vec<(IterationRecord, Vec<f64>)> {
    let mut rows = Vec::new();
    let mut sink = |r: &IterationRecord, x: &[f64]| rows.push((*r, x.to_vec()));
    lsmr_solve(a, b, opts, &mut sink).unwrap();
    rows
}

#[test]
fn estimates_match_direct_recomputation_with_full_reorth() {
    for seed in 0..20u64 {
        let mut r = rng(seed);
        let m = r.random_range(10..=60usize);
        let n = r.random_range(2..=m.min(30));
        let a = random_dense(&mut r, m, n);
        let b = random_vec(&mut r, m);
        let nb = norm(&b);
        for (rec, x) in trace(&a, &b, &tight(ReorthMode::Both, 0.0)) {
            let d = rec.diagnostics.unwrap();
            let nx = norm(&x);
            assert!((rec.norm_r_est - d.norm_r_true).abs() <= 1e-10 * (nb + rec.norm_a_est * rec.norm_x_est));
            assert!((rec.norm_atr_est - d.norm_atr_true).abs() <= 1e-8 * rec.norm_a_est * d.norm_r_true + 1e-12);
            assert!((rec.norm_x_est - nx).abs() <= 1e-10 * nx, "seed {seed} k {}", rec.k);
            assert!(d.lemma31_residual.unwrap() <= 1e-12 * nb);
        }
    }
}

#[test]
fn damped_estimates_track_the_augmented_system() {
    for (seed, lambda) in [(1u64, 0.1), (2, 1.0), (3, 10.0)] {
        let mut r = rng(seed);
        let a = random_dense(&mut r, 30, 12);
        let b = random_vec(&mut r, 30);
        for (rec, x) in trace(&a, &b, &tight(ReorthMode::Both, lambda)) {
            let d = rec.diagnostics.unwrap();
            let nx = norm(&x);
            assert!((rec.norm_r_est - d.norm_r_true).abs() <= 1e-10 * d.norm_r_true);
            assert!((rec.norm_atr_est - d.norm_atr_true).abs() <= 1e-8 * rec.norm_a_est * d.norm_r_true + 1e-12);
            assert!((rec.norm_x_est - nx).abs() <= 1e-10 * nx);
        }
    }
}

#[test]
fn atr_estimate_is_nonincreasing_in_every_mode() {
    let modes = [
        ReorthMode::None,
        ReorthMode::VOnly,
        ReorthMode::UOnly,
        ReorthMode::Both,
        ReorthMode::Local(3),
    ];
    for seed in 0..10u64 {
        let mut r = rng(100 + seed);
        let a = with_spectrum(&mut r, 40, 20, 1e6, 20);
        let b = random_vec(&mut r, 40);
        for mode in modes {
            for lambda in [0.0, 1e-3] {
                let opts = SolveOptions { atol: 1e-12, btol: 1e-12, lambda, reorth: mode, ..Default::default() };
                let mut prev = f64::INFINITY;
                let mut sink = |rec: &IterationRecord, _: &[f64]| {
                    assert!(rec.norm_atr_est <= prev, "{mode:?} k={}", rec.k);
                    prev = rec.norm_atr_est;
                };
                lsmr_solve(&a, &b, &opts, &mut sink).unwrap();
            }
        }
    }
}

#[test]
fn residual_chain_base_case() {
    // After one step, with no P̃ yet, ‖r₁‖ = √((β̇₁ − τ̇₁)² + β̈₂²) with β̇₁ = 0.
    let a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[1.0, 1.0], &[0.0, 3.0]]);
    let b = [1.0, 2.0, -1.0];
    let mut s = Lsmr::new(&a, &b, &SolveOptions::default()).unwrap();
    s.step().unwrap();
    let x = s.x().to_vec();
    let mut res = b.to_vec();
    for (ri, ax) in res.iter_mut().zip(a.apply(&x).unwrap()) {
        *ri -= ax;
    }
    assert!((s.estimates().norm_r - norm(&res)).abs() < 1e-14);
    // One-dimensional Krylov space: ‖x₁‖ is the single coefficient.
    assert!((s.estimates().norm_x - norm(&x)).abs() < 1e-14);
}

#[test]
fn identity_estimates() {
    let b = [3.0, 0.0, -4.0, 12.0];
    let mut rows = Vec::new();
    let mut sink = |r: &IterationRecord, _: &[f64]| rows.push(*r);
    lsmr_solve(&Identity(4), &b, &SolveOptions::default(), &mut sink).unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last.k, 1);
    assert!((last.norm_x_est - 13.0).abs() < 1e-13);
    assert!((last.norm_a_est - 1.0).abs() < 1e-15);
    assert!((last.cond_est - 1.0).abs() < 1e-15);
    assert!(last.norm_r_est <= 1e-10 * 13.0);
}

#[test]
fn norm_and_condition_estimates_are_bounded_by_the_truth() {
    for seed in 0..5u64 {
        let mut r = rng(200 + seed);
        let a = with_spectrum(&mut r, 40, 10, 10f64.powi(seed as i32 + 1), 10);
        let b = random_vec(&mut r, 40);
        let opts = SolveOptions { atol: 1e-14, btol: 1e-14, reorth: ReorthMode::Both, ..Default::default() };
        let res = lsmr_solve(&a, &b, &opts, &mut lsmr_core::lsmr::NoTrace).unwrap();
        let s = singular_values(&a).unwrap();
        assert!(res.norm_a <= a.frobenius_norm() * (1.0 + 1e-12));
        assert!(res.cond_a <= s[0] / s[9] * 10.0);
        assert!(res.cond_a >= 1.0);
    }
}
