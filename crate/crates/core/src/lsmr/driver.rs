use alloc::vec;
use alloc::vec::Vec;

use super::restart::lsmr_solve_restarted;
use super::{
    breakdown_reason, check_stop, with_diagnostics, Estimates, IterationRecord, LsmrRecurrence, SolveOptions,
    SolveResult, StopReason, TraceSink,
};
use crate::error::{check_len, Error, Result};
use crate::gk::{gk_init, GkState, ReorthMode};
use crate::linop::LinearOperator;

/// An LSMR solve that can be advanced one iteration at a time.
///
/// Holds the bidiagonalization (`v` plus the `u` and `Av` m-vectors) and the
/// recurrence (`x`, `h`, `h̄`); nothing else of problem size is allocated.
///
/// Per iteration, besides one product with `A` and one with `Aᵀ`:
/// m-vector work is `Av − αu`, `‖·‖` and the scaling of `u` (3 passes);
/// n-vector work is `−βv`, `‖·‖`, the scaling of `v`, and the `h̄`, `x`, `h`
/// updates (6 passes). Reorthogonalization and diagnostics add to this.
pub struct Lsmr<'a, Op: LinearOperator + ?Sized> {
    op: &'a Op,
    b: &'a [f64],
    opts: SolveOptions,
    norm_b: f64,
    max_iter: usize,
    gk: GkState,
    rec: Option<LsmrRecurrence>,
    reason: Option<StopReason>,
}

impl<'a, Op: LinearOperator + ?Sized> Lsmr<'a, Op> {
    /// Runs `gk_init` and the initialization of the recurrences. `RESTART`
    /// is handled by [`lsmr_solve`]; here it behaves as `V_ONLY`.
    pub fn new(op: &'a Op, b: &'a [f64], opts: &SolveOptions) -> Result<Self> {
        Self::with_damping_path(op, b, opts, opts.lambda > 0.0)
    }

    pub(crate) fn with_damping_path(op: &'a Op, b: &'a [f64], opts: &SolveOptions, damped: bool) -> Result<Self> {
        opts.validate()?;
        check_len(op.nrows(), b.len())?;
        let (norm_b, gk) = gk_init(op, b, opts.reorth, opts.reorth_cap)?;
        let reason = breakdown_reason(gk.status(), opts.lambda);
        let rec = gk
            .is_active()
            .then(|| LsmrRecurrence::new(norm_b, gk.alpha(), gk.v(), opts.lambda, damped));
        Ok(Self {
            op,
            b,
            opts: *opts,
            norm_b,
            max_iter: opts.iteration_limit(op.nrows(), op.ncols()),
            gk,
            rec,
            reason,
        })
    }

    /// Iterations completed.
    pub fn iterations(&self) -> usize {
        self.rec.as_ref().map_or(0, LsmrRecurrence::k)
    }

    pub fn norm_b(&self) -> f64 {
        self.norm_b
    }

    /// Set once a stopping rule has fired.
    pub fn reason(&self) -> Option<StopReason> {
        self.reason
    }

    pub fn estimates(&self) -> Estimates {
        match &self.rec {
            Some(rec) => *rec.estimates(),
            None => Estimates {
                norm_r: self.norm_b,
                norm_atr: 0.0,
                norm_x: 0.0,
                norm_a: crate::math::hypot(self.gk.alpha(), self.opts.lambda),
                cond: 1.0,
            },
        }
    }

    pub fn x(&self) -> &[f64] {
        self.rec.as_ref().map_or(&[], LsmrRecurrence::x)
    }

    pub fn recurrence(&self) -> Option<&LsmrRecurrence> {
        self.rec.as_ref()
    }

    pub fn gk(&self) -> &GkState {
        &self.gk
    }

    /// Trace row for the current iterate, with diagnostics when enabled.
    pub fn record(&self) -> IterationRecord {
        let rec = IterationRecord::from_estimates(self.iterations(), &self.estimates());
        if !self.opts.diagnostics {
            return rec;
        }
        let lemma = self.rec.as_ref().map_or(0.0, LsmrRecurrence::lemma_residual);
        match &self.rec {
            Some(r) => with_diagnostics(rec, self.op, self.b, r.x(), self.opts.lambda, Some(lemma)),
            None => with_diagnostics(rec, self.op, self.b, &vec![0.0; self.op.ncols()], self.opts.lambda, Some(lemma)),
        }
    }

    /// Performs one iteration (one forward and one adjoint product) without
    /// testing for convergence. Returns `false` if already terminated.
    pub fn advance(&mut self) -> Result<bool> {
        if self.reason.is_some() || !self.gk.is_active() {
            return Ok(false);
        }
        let Some(rec) = self.rec.as_mut() else { return Ok(false) };
        let (beta, alpha) = self.gk.step(self.op)?;
        rec.advance(alpha, beta, self.gk.v());
        if !rec.is_finite() {
            return Err(Error::NonFinite { iteration: rec.k() });
        }
        Ok(true)
    }

    /// Advances one iteration and applies the stopping rules.
    pub fn step(&mut self) -> Result<Option<StopReason>> {
        if self.reason.is_some() {
            return Ok(self.reason);
        }
        self.advance()?;
        self.reason = breakdown_reason(self.gk.status(), self.opts.lambda)
            .or_else(|| check_stop(&self.estimates(), self.norm_b, &self.opts, self.iterations(), self.max_iter));
        Ok(self.reason)
    }

    /// Runs to termination, sending the initial state and every iterate to `sink`.
    pub fn run(mut self, sink: &mut dyn TraceSink) -> Result<SolveResult> {
        sink.record(&self.record(), &self.x_or_zero());
        while self.reason.is_none() {
            self.step()?;
            sink.record(&self.record(), self.x());
        }
        Ok(self.finish())
    }

    fn x_or_zero(&self) -> Vec<f64> {
        match &self.rec {
            Some(r) => r.x().to_vec(),
            None => vec![0.0; self.op.ncols()],
        }
    }

    pub fn finish(self) -> SolveResult {
        let est = self.estimates();
        let iterations = self.iterations();
        let reason = self.reason.unwrap_or(StopReason::MaxIter);
        let x = match self.rec {
            Some(r) => r.into_x(),
            None => vec![0.0; self.op.ncols()],
        };
        let (norm_r, norm_a) = if reason == StopReason::BZero { (0.0, 0.0) } else { (est.norm_r, est.norm_a) };
        SolveResult {
            x,
            reason,
            iterations,
            norm_r,
            norm_atr: est.norm_atr,
            norm_x: est.norm_x,
            norm_a,
            cond_a: est.cond,
        }
    }

    /// Problem-size vectors owned by the solve: `(n-vectors, m-vectors,
    /// floats in reorthogonalization bases)`.
    pub fn footprint(&self) -> (usize, usize, usize) {
        let (gn, gm, stored) = self.gk.footprint();
        let rn = self.rec.as_ref().map_or(0, LsmrRecurrence::n_vectors);
        (gn + rn, gm, stored)
    }
}

/// Solves `min ‖Ax − b‖² + λ²‖x‖²` with LSMR.
///
/// `sink` receives a row for `k = 0` and one per iteration.
pub fn lsmr_solve<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<SolveResult> {
    if let ReorthMode::Restart(_) = opts.reorth {
        return lsmr_solve_restarted(op, b, opts, sink);
    }
    Lsmr::new(op, b, opts)?.run(sink)
}

/// Like [`lsmr_solve`] but always applies the damping rotation, even for `λ = 0`.
pub fn lsmr_solve_general_path<Op: LinearOperator + ?Sized>(
    op: &Op,
    b: &[f64],
    opts: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<SolveResult> {
    Lsmr::with_damping_path(op, b, opts, true)?.run(sink)
}
