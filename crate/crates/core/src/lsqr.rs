//! LSQR on the same bidiagonalization, as a reference for LSMR.
//!
//! LSQR minimizes `‖r_k‖` over the Krylov subspace where LSMR minimizes
//! `‖Aᵀr_k‖`. Damping follows the usual extension: each step first rotates
//! `λ` into `ρ̄_k`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::gk::{gk_init, ReorthMode};
use crate::linop::LinearOperator;
use crate::lsmr::restart::{solve_restarted, Segment};
use crate::lsmr::{
    breakdown_reason, check_stop, sym_ortho, with_diagnostics, Estimates,
    IterationRecord, SolveOptions, SolveResult, StopReason, TraceSink,
};
use crate::math::{hypot, sqrt};
use crate::vecops::{axpy, norm2};

/// LSQR scalars plus `x` and the search direction `w`.
#[derive(Debug, Clone)]
pub struct LsqrRecurrence {
    lambda: f64,
    k: usize,
    rhobar: f64,
    phibar: f64,
    norm_a2: f64,
    ddnorm: f64,
    res2: f64,
    xxnorm: f64,
    z: f64,
    cs2: f64,
    sn2: f64,
    est: Estimates,
    x: Vec<f64>,
    w: Vec<f64>,
}

impl LsqrRecurrence {
    pub fn new(beta1: f64, alpha1: f64, v1: &[f64], lambda: f64) -> Self {
        Self {
            lambda,
            k: 0,
            rhobar: alpha1,
            phibar: beta1,
            norm_a2: 0.0,
            ddnorm: 0.0,
            res2: 0.0,
            xxnorm: 0.0,
            z: 0.0,
            cs2: -1.0,
            sn2: 0.0,
            est: Estimates {
                norm_r: beta1,
                norm_atr: alpha1 * beta1,
                norm_x: 0.0,
                norm_a: hypot(alpha1, lambda),
                cond: 1.0,
            },
            x: vec![0.0; v1.len()],
            w: v1.to_vec(),
        }
    }

    /// Iteration `k` from `α_k` (`alpha`), `α_{k+1}`, `β_{k+1}` and `v_{k+1}`.
    pub fn advance(&mut self, alpha: f64, alpha_next: f64, beta_next: f64, v_next: &[f64]) -> &Estimates {
        self.k += 1;
        let dampsq = self.lambda * self.lambda;
        self.norm_a2 += alpha * alpha + beta_next * beta_next + dampsq;

        let (rhobar1, psi) = if self.lambda > 0.0 {
            let rhobar1 = hypot(self.rhobar, self.lambda);
            let cs1 = self.rhobar / rhobar1;
            let sn1 = self.lambda / rhobar1;
            let psi = sn1 * self.phibar;
            self.phibar *= cs1;
            (rhobar1, psi)
        } else {
            (self.rhobar, 0.0)
        };

        let (cs, sn, rho) = sym_ortho(rhobar1, beta_next);
        let theta = sn * alpha_next;
        self.rhobar = -cs * alpha_next;
        let phi = cs * self.phibar;
        self.phibar *= sn;
        let tau = sn * phi;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        let wn = norm2(&self.w) / rho;
        self.ddnorm += wn * wn;
        axpy(t1, &self.w, &mut self.x);
        for (w, v) in self.w.iter_mut().zip(v_next) {
            *w = v + t2 * *w;
        }

        // ‖x_k‖ via the LQ factorization of the upper bidiagonal factor.
        let delta = self.sn2 * rho;
        let gambar = -self.cs2 * rho;
        let rhs = phi - delta * self.z;
        let zbar = rhs / gambar;
        self.est.norm_x = sqrt(self.xxnorm + zbar * zbar);
        let gamma = hypot(gambar, theta);
        self.cs2 = gambar / gamma;
        self.sn2 = theta / gamma;
        self.z = rhs / gamma;
        self.xxnorm += self.z * self.z;

        self.est.norm_a = sqrt(self.norm_a2);
        self.est.cond = self.est.norm_a * sqrt(self.ddnorm);
        self.res2 += psi * psi;
        self.est.norm_r = sqrt(self.phibar * self.phibar + self.res2);
        self.est.norm_atr = alpha_next * tau.abs();
        &self.est
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn estimates(&self) -> &Estimates {
        &self.est
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn into_x(self) -> Vec<f64> {
        self.x
    }

    pub fn is_finite(&self) -> bool {
        [self.rhobar, self.phibar, self.z, self.est.norm_r, self.est.norm_x, self.est.cond]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Solves `min ‖Ax − b‖² + λ²‖x‖²` with LSQR, under the same stopping rules
/// and trace contract as [`crate::lsmr::lsmr_solve`].
pub fn lsqr_solve<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<SolveResult> {
    opts.validate()?;
    check_len(op.nrows(), b.len())?;
    if let ReorthMode::Restart(_) = opts.reorth {
        return solve_restarted(op, b, opts, sink, Segment::Lsqr);
    }
    let n = op.ncols();
    let max_iter = opts.iteration_limit(op.nrows(), n);
    let (norm_b, mut gk) = gk_init(op, b, opts.reorth, opts.reorth_cap)?;

    let emit = |sink: &mut dyn TraceSink, k: usize, est: &Estimates, x: &[f64]| {
        let mut rec = IterationRecord::from_estimates(k, est);
        if opts.diagnostics {
            rec = with_diagnostics(rec, op, b, x, opts.lambda, None);
        }
        sink.record(&rec, x);
    };

    if let Some(reason) = breakdown_reason(gk.status(), opts.lambda) {
        let x = vec![0.0; n];
        let est = Estimates {
            norm_r: norm_b,
            norm_atr: 0.0,
            norm_x: 0.0,
            norm_a: if reason == StopReason::BZero { 0.0 } else { hypot(gk.alpha(), opts.lambda) },
            cond: 1.0,
        };
        emit(sink, 0, &est, &x);
        return Ok(result(x, reason, 0, &est));
    }

    let mut rec = LsqrRecurrence::new(norm_b, gk.alpha(), gk.v(), opts.lambda);
    emit(sink, 0, rec.estimates(), rec.x());
    loop {
        let alpha = gk.alpha();
        let (beta_next, alpha_next) = gk.step(op)?;
        rec.advance(alpha, alpha_next, beta_next, gk.v());
        if !rec.is_finite() {
            return Err(Error::NonFinite { iteration: rec.k() });
        }
        emit(sink, rec.k(), rec.estimates(), rec.x());
        let reason = breakdown_reason(gk.status(), opts.lambda)
            .or_else(|| check_stop(rec.estimates(), norm_b, opts, rec.k(), max_iter));
        if let Some(reason) = reason {
            let (k, est) = (rec.k(), *rec.estimates());
            return Ok(result(rec.into_x(), reason, k, &est));
        }
    }
}

pub(crate) fn result(x: Vec<f64>, reason: StopReason, iterations: usize, est: &Estimates) -> SolveResult {
    SolveResult {
        x,
        reason,
        iterations,
        norm_r: if reason == StopReason::BZero { 0.0 } else { est.norm_r },
        norm_atr: est.norm_atr,
        norm_x: est.norm_x,
        norm_a: est.norm_a,
        cond_a: est.cond,
    }
}
