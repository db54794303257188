//! LSMR restarted every `ℓ` iterations from the current residual.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_stop, with_diagnostics, Estimates, IterationRecord, LsmrRecurrence, SolveOptions, SolveResult,
    StopReason, TraceSink,
};
use crate::error::{check_len, Error, Result};
use crate::gk::{gk_init, GkStatus, ReorthMode};
use crate::lsqr::LsqrRecurrence;
use crate::linop::{Augmented, LinearOperator};
use crate::vecops::{axpy, norm2};

/// Runs segments of at most `ℓ` LSMR iterations. Each segment solves
/// `min ‖A d − r‖` with `r = b − A x` recomputed directly, then sets
/// `x ← x + d`. Stopping rules are evaluated against the global problem
/// after every iteration, so `iterations` counts products across segments.
/// Inside a segment the `v` vectors are fully reorthogonalized.
///
/// With `λ > 0` the segments run undamped on `[A; λI]` and `[b; 0]`, since a
/// warm start does not preserve the damped objective.
pub fn lsmr_solve_restarted<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<SolveResult> {
    solve_restarted(op, b, opts, sink, Segment::Lsmr)
}

/// Which recurrence runs inside each segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Segment {
    Lsmr,
    Lsqr,
}

enum Recurrence {
    Lsmr(Box<LsmrRecurrence>),
    Lsqr(LsqrRecurrence),
}

impl Recurrence {
    fn new(kind: Segment, beta1: f64, alpha1: f64, v1: &[f64]) -> Self {
        match kind {
            Segment::Lsmr => Recurrence::Lsmr(Box::new(LsmrRecurrence::new(beta1, alpha1, v1, 0.0, false))),
            Segment::Lsqr => Recurrence::Lsqr(LsqrRecurrence::new(beta1, alpha1, v1, 0.0)),
        }
    }

    fn advance(&mut self, alpha: f64, alpha_next: f64, beta_next: f64, v_next: &[f64]) -> Estimates {
        match self {
            Recurrence::Lsmr(r) => *r.advance(alpha_next, beta_next, v_next),
            Recurrence::Lsqr(r) => *r.advance(alpha, alpha_next, beta_next, v_next),
        }
    }

    fn x(&self) -> &[f64] {
        match self {
            Recurrence::Lsmr(r) => r.x(),
            Recurrence::Lsqr(r) => r.x(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Recurrence::Lsmr(r) => r.is_finite(),
            Recurrence::Lsqr(r) => r.is_finite(),
        }
    }

    fn lemma_residual(&self) -> Option<f64> {
        match self {
            Recurrence::Lsmr(r) => Some(r.lemma_residual()),
            Recurrence::Lsqr(_) => None,
        }
    }
}

pub(crate) fn solve_restarted<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
    kind: Segment,
) -> Result<SolveResult> {
    opts.validate()?;
    check_len(op.nrows(), b.len())?;
    let ReorthMode::Restart(period) = opts.reorth else {
        return Err(Error::InvalidOptions("restarted solve needs a RESTART mode"));
    };
    let max_iter = opts.iteration_limit(op.nrows(), op.ncols());
    if opts.lambda > 0.0 {
        let aug = Augmented { inner: op, lambda: opts.lambda };
        let mut b_aug = b.to_vec();
        b_aug.resize(op.nrows() + op.ncols(), 0.0);
        let inner = SolveOptions { lambda: 0.0, ..*opts };
        return run_segments(&aug, &b_aug, &inner, period, max_iter, sink, kind);
    }
    run_segments(op, b, opts, period, max_iter, sink, kind)
}

fn run_segments<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    period: usize,
    max_iter: usize,
    sink: &mut dyn TraceSink,
    kind: Segment,
) -> Result<SolveResult> {
    let n = op.ncols();
    let norm_b = norm2(b);
    let mut x = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut r = b.to_vec();
    let mut k = 0usize;
    let mut norm_a_floor = 0.0_f64;
    let mut lemma = 0.0_f64;

    let emit = |sink: &mut dyn TraceSink, k: usize, est: &Estimates, x: &[f64], lemma: Option<f64>| {
        let mut rec = IterationRecord::from_estimates(k, est);
        if opts.diagnostics {
            rec = with_diagnostics(rec, op, b, x, 0.0, lemma);
        }
        sink.record(&rec, x);
    };
    let lemma_of = |l: f64| (kind == Segment::Lsmr).then_some(l);

    loop {
        let (beta1, mut gk) = gk_init(op, &r, ReorthMode::VOnly, opts.reorth_cap)?;
        let mut est = Estimates {
            norm_r: beta1,
            norm_atr: gk.alpha() * beta1,
            norm_x: norm2(&x),
            norm_a: norm_a_floor.max(gk.alpha()),
            cond: 1.0,
        };
        norm_a_floor = est.norm_a;
        if k == 0 {
            emit(sink, 0, &est, &x, lemma_of(lemma));
        }
        let initial = match gk.status() {
            GkStatus::ZeroRhs if k == 0 => Some(StopReason::BZero),
            GkStatus::ZeroRhs => Some(StopReason::BreakdownConsistent),
            GkStatus::ZeroAtb => Some(StopReason::BreakdownLs),
            _ => None,
        };
        if let Some(reason) = initial {
            if reason == StopReason::BZero {
                est.norm_r = 0.0;
            }
            return Ok(finish(x, reason, k, est));
        }

        let mut rec = Recurrence::new(kind, beta1, gk.alpha(), gk.v());
        for _ in 0..period {
            let alpha = gk.alpha();
            let (beta_next, alpha_next) = gk.step(op)?;
            let mut est = rec.advance(alpha, alpha_next, beta_next, gk.v());
            k += 1;
            if !rec.is_finite() {
                return Err(Error::NonFinite { iteration: k });
            }
            norm_a_floor = norm_a_floor.max(est.norm_a);
            est.norm_a = norm_a_floor;
            trial.copy_from_slice(&x);
            axpy(1.0, rec.x(), &mut trial);
            est.norm_x = norm2(&trial);
            if let Some(l) = rec.lemma_residual() {
                lemma = lemma.max(l);
            }
            emit(sink, k, &est, &trial, lemma_of(lemma));

            let reason = match gk.status() {
                GkStatus::BetaBreakdown => Some(StopReason::BreakdownConsistent),
                GkStatus::AlphaBreakdown => Some(StopReason::BreakdownLs),
                _ => check_stop(&est, norm_b, opts, k, max_iter),
            };
            if let Some(reason) = reason {
                return Ok(finish(trial, reason, k, est));
            }
        }

        x.copy_from_slice(&trial);
        r.copy_from_slice(b);
        let ax = op.apply(&x)?;
        axpy(-1.0, &ax, &mut r);
    }
}

fn finish(x: Vec<f64>, reason: StopReason, iterations: usize, est: Estimates) -> SolveResult {
    SolveResult {
        x,
        reason,
        iterations,
        norm_r: est.norm_r,
        norm_atr: est.norm_atr,
        norm_x: est.norm_x,
        norm_a: est.norm_a,
        cond_a: est.cond,
    }
}
