//! CSV traces, one row per iteration, flushed as produced.

use lsmr_core::LinearOperator;
use std::io::{self, Write};

use lsmr_core::backerr::{oracle_residual, optimal_backward_error, stewart_e1};
use lsmr_core::linop::{to_dense, Augmented};
use lsmr_core::lockstep::LockstepRow;
use lsmr_core::lsmr::{IterationRecord, TraceSink};
use lsmr_core::{CsrMatrix, DenseMatrix};

use crate::vecio::fmt_f64;

pub const ESTIMATE_COLUMNS: [&str; 5] = ["normr_est", "normAr_est", "normx_est", "normA_est", "cond_est"];
pub const DIAGNOSTIC_COLUMNS: [&str; 6] = ["normr_true", "normAr_true", "lemma31_resid", "e1", "e2", "mu_tilde"];

/// Largest problem for which `E₁` and `μ̃` are evaluated: both need a dense
/// copy of the (augmented) matrix and a full factorization per row.
pub const ORACLE_MAX_DIM: usize = 1000;
pub const ORACLE_MAX_COLS: usize = 200;

/// Dense copy of `[A; λI]`, `[b; 0]` and the exact LS residual, for `E₁` and `μ̃`.
pub struct Oracle {
    a: DenseMatrix,
    b: Vec<f64>,
    r_hat: Vec<f64>,
}

impl Oracle {
    /// `None` when the problem is too large for dense evaluation.
    pub fn new(a: &CsrMatrix, b: &[f64], lambda: f64) -> lsmr_core::Result<Option<Self>> {
        let (m, n) = (a.nrows(), a.ncols());
        let m_aug = if lambda > 0.0 { m + n } else { m };
        if m_aug + n > ORACLE_MAX_DIM || n > ORACLE_MAX_COLS {
            return Ok(None);
        }
        let (dense, b) = if lambda > 0.0 {
            let mut b_aug = b.to_vec();
            b_aug.resize(m + n, 0.0);
            (to_dense(&Augmented { inner: a, lambda }), b_aug)
        } else {
            (a.to_dense(), b.to_vec())
        };
        let r_hat = oracle_residual(&dense, &b)?;
        Ok(Some(Self { a: dense, b, r_hat }))
    }

    /// `(E₁, μ̃)` at `x`; both undefined for `x = 0`.
    pub fn eval(&self, x: &[f64]) -> (Option<f64>, Option<f64>) {
        let mu = optimal_backward_error(&self.a, &self.b, x).ok();
        let ax = lsmr_core::LinearOperator::apply(&self.a, x).ok();
        let e1 = ax.and_then(|ax| {
            let r: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            stewart_e1(x, &r, &self.r_hat).ok().map(|e| e.value)
        });
        (e1, mu)
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn estimate_cells(rec: &IterationRecord) -> [String; 5] {
    [rec.norm_r_est, rec.norm_atr_est, rec.norm_x_est, rec.norm_a_est, rec.cond_est].map(fmt_f64)
}

fn diagnostic_cells(rec: &IterationRecord, oracle: Option<&Oracle>, x: &[f64]) -> [String; 6] {
    let d = rec.diagnostics.as_ref();
    let (e1, mu) = oracle.map_or((None, None), |o| o.eval(x));
    [
        cell(d.map(|d| d.norm_r_true)),
        cell(d.map(|d| d.norm_atr_true)),
        cell(d.and_then(|d| d.lemma31_residual)),
        cell(e1),
        cell(d.map(|d| d.e2)),
        cell(mu),
    ]
}

/// Single-solver trace with header
/// `k,normr_est,normAr_est,normx_est,normA_est,cond_est[,normr_true,normAr_true,lemma31_resid,e1,e2,mu_tilde]`.
pub struct CsvTrace<W: Write> {
    out: W,
    diagnostics: bool,
    oracle: Option<Oracle>,
    error: Option<io::Error>,
}

impl<W: Write> CsvTrace<W> {
    pub fn new(mut out: W, diagnostics: bool, oracle: Option<Oracle>) -> io::Result<Self> {
        let mut cols: Vec<&str> = vec!["k"];
        cols.extend(ESTIMATE_COLUMNS);
        if diagnostics {
            cols.extend(DIAGNOSTIC_COLUMNS);
        }
        writeln!(out, "{}", cols.join(","))?;
        out.flush()?;
        Ok(Self { out, diagnostics, oracle, error: None })
    }

    /// The first write error, if any row failed.
    pub fn finish(mut self) -> io::Result<W> {
        match self.error.take() {
            Some(e) => Err(e),
            None => Ok(self.out),
        }
    }

    fn write_row(&mut self, rec: &IterationRecord, x: &[f64]) -> io::Result<()> {
        let mut cells = vec![rec.k.to_string()];
        cells.extend(estimate_cells(rec));
        if self.diagnostics {
            cells.extend(diagnostic_cells(rec, self.oracle.as_ref(), x));
        }
        writeln!(self.out, "{}", cells.join(","))?;
        self.out.flush()
    }
}

impl<W: Write> TraceSink for CsvTrace<W> {
    fn record(&mut self, rec: &IterationRecord, x: &[f64]) {
        if self.error.is_none() {
            if let Err(e) = self.write_row(rec, x) {
                self.error = Some(e);
            }
        }
    }
}

/// Trace for a lockstep run: every column prefixed by solver, plus the
/// `E₂` estimates of both.
pub struct LockstepCsv<W: Write> {
    out: W,
    diagnostics: bool,
    oracle: Option<Oracle>,
}

impl<W: Write> LockstepCsv<W> {
    pub fn new(mut out: W, diagnostics: bool, oracle: Option<Oracle>) -> io::Result<Self> {
        let mut cols = vec!["k".to_string()];
        for solver in ["lsmr", "lsqr"] {
            cols.extend(ESTIMATE_COLUMNS.iter().map(|c| format!("{solver}_{c}")));
        }
        cols.push("e2_lsmr".into());
        cols.push("e2_lsqr".into());
        if diagnostics {
            for solver in ["lsmr", "lsqr"] {
                for c in ["normr_true", "normAr_true", "lemma31_resid", "e1", "mu_tilde"] {
                    cols.push(format!("{solver}_{c}"));
                }
            }
        }
        writeln!(out, "{}", cols.join(","))?;
        out.flush()?;
        Ok(Self { out, diagnostics, oracle })
    }

    pub fn write_row(&mut self, row: &LockstepRow, x_lsmr: &[f64], x_lsqr: &[f64]) -> io::Result<()> {
        let e2 = |r: &IterationRecord| if r.norm_r_est > 0.0 { r.norm_atr_est / r.norm_r_est } else { 0.0 };
        let mut cells = vec![row.k.to_string()];
        cells.extend(estimate_cells(&row.lsmr));
        cells.extend(estimate_cells(&row.lsqr));
        cells.push(fmt_f64(e2(&row.lsmr)));
        cells.push(fmt_f64(e2(&row.lsqr)));
        if self.diagnostics {
            for (rec, x) in [(&row.lsmr, x_lsmr), (&row.lsqr, x_lsqr)] {
                let [nr, nar, lemma, e1, _, mu] = diagnostic_cells(rec, self.oracle.as_ref(), x);
                cells.extend([nr, nar, lemma, e1, mu]);
            }
        }
        writeln!(self.out, "{}", cells.join(","))?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
