//! LSMR: minimizes `‖Aᵀr‖` over the Krylov subspace generated by the
//! Golub–Kahan process, with cheap estimates of `‖r‖`, `‖Aᵀr‖`, `‖x‖`, `‖A‖`
//! and `cond(A)`, and optional Tikhonov damping `λ`.

mod driver;
mod recurrence;
pub(crate) mod restart;
mod rotation;

pub use driver::{lsmr_solve, Lsmr};
#[doc(hidden)]
pub use driver::lsmr_solve_general_path;
pub use recurrence::LsmrRecurrence;
pub use restart::lsmr_solve_restarted;
pub use rotation::sym_ortho;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gk::{GkStatus, ReorthMode, DEFAULT_REORTH_CAP};
use crate::linop::LinearOperator;
use crate::vecops::{axpy, norm2};

/// Tolerances and modes shared by [`lsmr_solve`] and [`crate::lsqr::lsqr_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub atol: f64,
    pub btol: f64,
    /// Stop once the condition estimate reaches this value. `f64::INFINITY` disables S3.
    pub conlim: f64,
    /// Damping parameter `λ ≥ 0`.
    pub lambda: f64,
    /// Iteration limit; `None` means `4·min(m, n)`.
    pub max_iter: Option<usize>,
    pub reorth: ReorthMode,
    /// Compute true residual norms and the internal consistency check each iteration.
    pub diagnostics: bool,
    /// Cap on floats stored for reorthogonalization.
    pub reorth_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            atol: 1e-6,
            btol: 1e-6,
            conlim: 1e8,
            lambda: 0.0,
            max_iter: None,
            reorth: ReorthMode::None,
            diagnostics: false,
            reorth_cap: DEFAULT_REORTH_CAP,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.atol) {
            return Err(Error::InvalidOptions("atol must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.btol) {
            return Err(Error::InvalidOptions("btol must lie in [0, 1)"));
        }
        if self.conlim.is_nan() || self.conlim <= 1.0 {
            return Err(Error::InvalidOptions("conlim must exceed 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidOptions("lambda must be finite and nonnegative"));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidOptions("max_iter must be positive"));
        }
        self.reorth.validate()
    }

    /// The iteration limit for an `m × n` problem.
    pub fn iteration_limit(&self, m: usize, n: usize) -> usize {
        self.max_iter.unwrap_or(4 * m.min(n)).max(1)
    }
}

/// Why a solve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// `b = 0`, so `x = 0` is exact.
    BZero,
    /// `β_{k+1} = 0`: `A x_k = b` exactly (or, with damping, the damped
    /// normal equations hold exactly).
    BreakdownConsistent,
    /// `α_{k+1} = 0`: `Āᵀ r̄_k = 0` exactly.
    BreakdownLs,
    /// `‖r‖ ≤ BTOL‖b‖ + ATOL‖A‖‖x‖`.
    S1Compatible,
    /// `‖Āᵀr̄‖ ≤ ATOL‖Ā‖‖r̄‖`.
    S2LeastSquares,
    /// `cond(Ā) ≥ CONLIM`, or the estimate reached `1/ε`.
    S3CondLimit,
    /// S1 with tolerances at machine precision.
    S1Eps,
    /// S2 with tolerances at machine precision.
    S2Eps,
    MaxIter,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::BZero => "B_ZERO",
            StopReason::BreakdownConsistent => "BREAKDOWN_CONSISTENT",
            StopReason::BreakdownLs => "BREAKDOWN_LS",
            StopReason::S1Compatible => "S1_COMPATIBLE",
            StopReason::S2LeastSquares => "S2_LEAST_SQUARES",
            StopReason::S3CondLimit => "S3_COND_LIMIT",
            StopReason::S1Eps => "S1_EPS",
            StopReason::S2Eps => "S2_EPS",
            StopReason::MaxIter => "MAX_ITER",
        }
    }
}

impl core::fmt::Display for StopReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five running estimates, all for the damped problem when `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimates {
    pub norm_r: f64,
    pub norm_atr: f64,
    pub norm_x: f64,
    pub norm_a: f64,
    pub cond: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub reason: StopReason,
    pub iterations: usize,
    pub norm_r: f64,
    pub norm_atr: f64,
    pub norm_x: f64,
    pub norm_a: f64,
    pub cond_a: f64,
}

/// Directly recomputed quantities attached to a trace row when diagnostics are on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `‖b − A x_k‖`, or `‖r̄_k‖` of the augmented system when `λ > 0`.
    pub norm_r_true: f64,
    /// `‖Aᵀ r_k‖`, or `‖Āᵀ r̄_k‖` when `λ > 0`.
    pub norm_atr_true: f64,
    /// Largest `|τ̃ᵢ − β̃ᵢ|` so far; `None` for solvers without that chain.
    pub lemma31_residual: Option<f64>,
    /// `norm_atr_est / norm_r_est` (zero when the residual estimate is zero).
    pub e2: f64,
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub norm_r_est: f64,
    pub norm_atr_est: f64,
    pub norm_x_est: f64,
    pub norm_a_est: f64,
    pub cond_est: f64,
    pub diagnostics: Option<Diagnostics>,
}

impl IterationRecord {
    pub fn from_estimates(k: usize, est: &Estimates) -> Self {
        Self {
            k,
            norm_r_est: est.norm_r,
            norm_atr_est: est.norm_atr,
            norm_x_est: est.norm_x,
            norm_a_est: est.norm_a,
            cond_est: est.cond,
            diagnostics: None,
        }
    }
}

/// Receives one record per iteration together with the current iterate.
pub trait TraceSink {
    fn record(&mut self, rec: &IterationRecord, x: &[f64]);
}

impl<F: FnMut(&IterationRecord, &[f64])> TraceSink for F {
    fn record(&mut self, rec: &IterationRecord, x: &[f64]) {
        self(rec, x)
    }
}

/// Discards every record.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn record(&mut self, _rec: &IterationRecord, _x: &[f64]) {}
}

/// Maps a terminal bidiagonalization status to a stop reason.
pub(crate) fn breakdown_reason(status: GkStatus, lambda: f64) -> Option<StopReason> {
    match status {
        GkStatus::Active => None,
        GkStatus::ZeroRhs => Some(StopReason::BZero),
        GkStatus::ZeroAtb | GkStatus::AlphaBreakdown => Some(StopReason::BreakdownLs),
        GkStatus::BetaBreakdown if lambda == 0.0 => Some(StopReason::BreakdownConsistent),
        GkStatus::BetaBreakdown => Some(StopReason::BreakdownLs),
    }
}

/// Convergence tests S1–S3 and their machine-precision analogues, in
/// priority order, followed by the iteration limit.
pub fn check_stop(est: &Estimates, norm_b: f64, opts: &SolveOptions, k: usize, max_iter: usize) -> Option<StopReason> {
    let test1 = est.norm_r / norm_b;
    let ar = est.norm_a * est.norm_r;
    let test2 = if ar == 0.0 { f64::INFINITY } else { est.norm_atr / ar };
    let test3 = 1.0 / est.cond;
    let ax_over_b = est.norm_a * est.norm_x / norm_b;
    let t1 = test1 / (1.0 + ax_over_b);
    let rtol = opts.btol + opts.atol * ax_over_b;
    let ctol = if opts.conlim.is_finite() { 1.0 / opts.conlim } else { 0.0 };

    if test1 <= rtol {
        Some(StopReason::S1Compatible)
    } else if test2 <= opts.atol {
        Some(StopReason::S2LeastSquares)
    } else if test3 <= ctol {
        Some(StopReason::S3CondLimit)
    } else if 1.0 + t1 <= 1.0 {
        Some(StopReason::S1Eps)
    } else if 1.0 + test2 <= 1.0 {
        Some(StopReason::S2Eps)
    } else if 1.0 + test3 <= 1.0 {
        Some(StopReason::S3CondLimit)
    } else if k >= max_iter {
        Some(StopReason::MaxIter)
    } else {
        None
    }
}

/// `(‖r̄‖, ‖Āᵀr̄‖)` recomputed from `x` with one forward and one adjoint product.
pub fn true_residual_norms<Op: LinearOperator + ?Sized>(op: &Op, b: &[f64], x: &[f64], lambda: f64) -> (f64, f64) {
    let mut r = b.to_vec();
    let ax = op.apply(x).expect("iterate length matches operator");
    axpy(-1.0, &ax, &mut r);
    let mut atr = op.apply_adjoint(&r).expect("residual length matches operator");
    let mut norm_r = norm2(&r);
    if lambda > 0.0 {
        let lx = lambda * norm2(x);
        norm_r = crate::math::hypot(norm_r, lx);
        axpy(-lambda * lambda, x, &mut atr);
    }
    (norm_r, norm2(&atr))
}

pub(crate) fn with_diagnostics<Op: LinearOperator + ?Sized>(
    mut rec: IterationRecord,
    op: &Op,
    b: &[f64],
    x: &[f64],
    lambda: f64,
    lemma: Option<f64>,
) -> IterationRecord {
    let (norm_r_true, norm_atr_true) = true_residual_norms(op, b, x, lambda);
    let e2 = if rec.norm_r_est > 0.0 { rec.norm_atr_est / rec.norm_r_est } else { 0.0 };
    rec.diagnostics = Some(Diagnostics { norm_r_true, norm_atr_true, lemma31_residual: lemma, e2 });
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(norm_r: f64, norm_atr: f64, norm_x: f64, norm_a: f64, cond: f64) -> Estimates {
        Estimates { norm_r, norm_atr, norm_x, norm_a, cond }
    }

    #[test]
    fn defaults_validate() {
        let o = SolveOptions::default();
        assert!(o.validate().is_ok());
        assert_eq!(o.iteration_limit(30, 10), 40);
        assert_eq!((o.atol, o.btol, o.conlim), (1e-6, 1e-6, 1e8));
    }

    #[test]
    fn invalid_options_rejected() {
        let bad = [
            SolveOptions { atol: 1.0, ..Default::default() },
            SolveOptions { btol: -1e-3, ..Default::default() },
            SolveOptions { conlim: 1.0, ..Default::default() },
            SolveOptions { lambda: -0.5, ..Default::default() },
            SolveOptions { max_iter: Some(0), ..Default::default() },
            SolveOptions { reorth: ReorthMode::Local(0), ..Default::default() },
        ];
        for o in bad {
            assert!(matches!(o.validate(), Err(Error::InvalidOptions(_))), "{o:?}");
        }
        let inf = SolveOptions { conlim: f64::INFINITY, ..Default::default() };
        assert!(inf.validate().is_ok());
    }

    #[test]
    fn stop_priority() {
        let o = SolveOptions::default();
        // Everything fires: S1 wins.
        assert_eq!(check_stop(&est(0.0, 0.0, 1.0, 1.0, 1e20), 1.0, &o, 99, 1), Some(StopReason::S1Compatible));
        // S2 but not S1.
        assert_eq!(check_stop(&est(0.5, 1e-9, 1.0, 1.0, 1e20), 1.0, &o, 99, 1), Some(StopReason::S2LeastSquares));
        assert_eq!(check_stop(&est(0.5, 0.1, 1.0, 1.0, 1e9), 1.0, &o, 99, 1), Some(StopReason::S3CondLimit));
        assert_eq!(check_stop(&est(0.5, 0.1, 1.0, 1.0, 10.0), 1.0, &o, 5, 5), Some(StopReason::MaxIter));
        assert_eq!(check_stop(&est(0.5, 0.1, 1.0, 1.0, 10.0), 1.0, &o, 4, 5), None);
    }

    #[test]
    fn eps_variants_fire_with_zero_tolerances() {
        let o = SolveOptions { atol: 0.0, btol: 0.0, conlim: f64::INFINITY, ..Default::default() };
        assert_eq!(check_stop(&est(1e-17, 0.1, 1.0, 1.0, 10.0), 1.0, &o, 1, 9), Some(StopReason::S1Eps));
        assert_eq!(check_stop(&est(0.5, 1e-17, 1.0, 1.0, 10.0), 1.0, &o, 1, 9), Some(StopReason::S2Eps));
        assert_eq!(check_stop(&est(0.5, 0.1, 1.0, 1.0, 1e17), 1.0, &o, 1, 9), Some(StopReason::S3CondLimit));
    }

    #[test]
    fn breakdown_mapping() {
        assert_eq!(breakdown_reason(GkStatus::Active, 0.0), None);
        assert_eq!(breakdown_reason(GkStatus::ZeroRhs, 0.0), Some(StopReason::BZero));
        assert_eq!(breakdown_reason(GkStatus::BetaBreakdown, 0.0), Some(StopReason::BreakdownConsistent));
        assert_eq!(breakdown_reason(GkStatus::BetaBreakdown, 0.5), Some(StopReason::BreakdownLs));
        assert_eq!(breakdown_reason(GkStatus::AlphaBreakdown, 0.0), Some(StopReason::BreakdownLs));
    }

    #[test]
    fn reason_names() {
        assert_eq!(StopReason::S2LeastSquares.as_str(), "S2_LEAST_SQUARES");
        assert_eq!(std::format!("{}", StopReason::MaxIter), "MAX_ITER");
    }
}
