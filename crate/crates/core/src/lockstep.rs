//! LSMR and LSQR advanced together on one bidiagonalization.
//!
//! Both recurrences consume the identical `(α, β, v)` stream, so any
//! difference between them at iteration `k` comes from the choice of `y_k`
//! alone.

use crate::error::{check_len, Error, Result};
use crate::gk::{gk_init, ReorthMode};
use crate::linop::LinearOperator;
use crate::lsmr::{
    breakdown_reason, check_stop, with_diagnostics, IterationRecord, LsmrRecurrence, SolveOptions, SolveResult,
    StopReason,
};
use crate::lsqr::{result, LsqrRecurrence};

/// Both solvers' trace rows at one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockstepRow {
    pub k: usize,
    pub lsmr: IterationRecord,
    pub lsqr: IterationRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LockstepResult {
    pub lsmr: SolveResult,
    pub lsqr: SolveResult,
    /// Iterations of the shared bidiagonalization.
    pub iterations: usize,
}

/// Runs until both solvers have met a stopping rule. Each solver's result is
/// captured when its own rule fires, so it equals the standalone solve.
/// Rows keep coming for both until the later one stops.
pub fn lockstep<Op, F>(op: &Op, b: &[f64], opts: &SolveOptions, mut sink: F) -> Result<LockstepResult>
where
    Op: LinearOperator + ?Sized,
    F: FnMut(&LockstepRow, &[f64], &[f64]),
{
    opts.validate()?;
    check_len(op.nrows(), b.len())?;
    if let ReorthMode::Restart(_) = opts.reorth {
        return Err(Error::InvalidOptions("lockstep runs need a single bidiagonalization; RESTART is not supported"));
    }
    let n = op.ncols();
    let max_iter = opts.iteration_limit(op.nrows(), n);
    let (norm_b, mut gk) = gk_init(op, b, opts.reorth, opts.reorth_cap)?;
    let lambda = opts.lambda;
    let mut lsmr = LsmrRecurrence::new(norm_b, gk.alpha(), gk.v(), lambda, lambda > 0.0);
    let mut lsqr = LsqrRecurrence::new(norm_b, gk.alpha(), gk.v(), lambda);

    let rows = |k: usize, lsmr: &LsmrRecurrence, lsqr: &LsqrRecurrence| {
        let mut a = IterationRecord::from_estimates(k, lsmr.estimates());
        let mut q = IterationRecord::from_estimates(k, lsqr.estimates());
        if opts.diagnostics {
            a = with_diagnostics(a, op, b, lsmr.x(), lambda, Some(lsmr.lemma_residual()));
            q = with_diagnostics(q, op, b, lsqr.x(), lambda, None);
        }
        LockstepRow { k, lsmr: a, lsqr: q }
    };

    let initial = breakdown_reason(gk.status(), lambda);
    let mut row = rows(0, &lsmr, &lsqr);
    if let Some(reason) = initial {
        if reason == StopReason::BZero {
            row.lsmr.norm_a_est = 0.0;
            row.lsqr.norm_a_est = 0.0;
        } else {
            row.lsmr.norm_atr_est = 0.0;
            row.lsqr.norm_atr_est = 0.0;
        }
    }
    sink(&row, lsmr.x(), lsqr.x());
    if let Some(reason) = initial {
        let lsmr_res = result(lsmr.into_x(), reason, 0, &estimates_of(&row.lsmr));
        let lsqr_res = result(lsqr.into_x(), reason, 0, &estimates_of(&row.lsqr));
        return Ok(LockstepResult { lsmr: lsmr_res, lsqr: lsqr_res, iterations: 0 });
    }

    let mut lsmr_done: Option<SolveResult> = None;
    let mut lsqr_done: Option<SolveResult> = None;
    loop {
        let alpha = gk.alpha();
        let (beta_next, alpha_next) = gk.step(op)?;
        lsmr.advance(alpha_next, beta_next, gk.v());
        lsqr.advance(alpha, alpha_next, beta_next, gk.v());
        let k = lsmr.k();
        if !lsmr.is_finite() || !lsqr.is_finite() {
            return Err(Error::NonFinite { iteration: k });
        }
        sink(&rows(k, &lsmr, &lsqr), lsmr.x(), lsqr.x());

        let broke = breakdown_reason(gk.status(), lambda);
        if lsmr_done.is_none() {
            if let Some(reason) = broke.or_else(|| check_stop(lsmr.estimates(), norm_b, opts, k, max_iter)) {
                lsmr_done = Some(result(lsmr.x().to_vec(), reason, k, lsmr.estimates()));
            }
        }
        if lsqr_done.is_none() {
            if let Some(reason) = broke.or_else(|| check_stop(lsqr.estimates(), norm_b, opts, k, max_iter)) {
                lsqr_done = Some(result(lsqr.x().to_vec(), reason, k, lsqr.estimates()));
            }
        }
        if let (Some(_), Some(_)) = (&lsmr_done, &lsqr_done) {
            break;
        }
    }
    Ok(LockstepResult {
        lsmr: lsmr_done.expect("set before loop exit"),
        lsqr: lsqr_done.expect("set before loop exit"),
        iterations: gk.k() - 1,
    })
}

fn estimates_of(r: &IterationRecord) -> crate::lsmr::Estimates {
    crate::lsmr::Estimates {
        norm_r: r.norm_r_est,
        norm_atr: r.norm_atr_est,
        norm_x: r.norm_x_est,
        norm_a: r.norm_a_est,
        cond: r.cond_est,
    }
}
