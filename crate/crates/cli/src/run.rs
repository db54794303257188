//! The `solve` and `generate` subcommands.

use lsmr_core::LinearOperator;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use lsmr_core::linop::column_unit_scale;
use lsmr_core::lockstep::lockstep;
use lsmr_core::lsmr::{lsmr_solve, NoTrace, SolveOptions, SolveResult, StopReason, TraceSink};
use lsmr_core::lsqr::lsqr_solve;
use lsmr_core::{CsrMatrix, ReorthMode};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::generate::{generate, ProblemSpec};
use crate::mm::{read_matrix_market, write_matrix_market};
use crate::trace::{CsvTrace, LockstepCsv, Oracle};
use crate::vecio::{read_vector, write_vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RhsMode {
    /// Read `b` from `--rhs`.
    File,
    /// `b` is all ones.
    Ones,
    /// Solve with the transpose of the matrix and read `b` (an LP objective) from `--rhs`.
    FromMatrixObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverKind {
    Lsmr,
    Lsqr,
    BothLockstep,
}

impl SolverKind {
    fn name(self) -> &'static str {
        match self {
            SolverKind::Lsmr => "lsmr",
            SolverKind::Lsqr => "lsqr",
            SolverKind::BothLockstep => "both-lockstep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub matrix: PathBuf,
    pub rhs: Option<PathBuf>,
    pub rhs_mode: RhsMode,
    pub solver: SolverKind,
    pub lambda: f64,
    pub atol: f64,
    pub btol: f64,
    pub conlim: f64,
    pub max_iter: Option<usize>,
    pub reorth: ReorthMode,
    pub scale: bool,
    pub trace: Option<PathBuf>,
    pub solution: Option<PathBuf>,
    pub diagnostics: bool,
}

impl SolveConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            atol: self.atol,
            btol: self.btol,
            conlim: self.conlim,
            lambda: self.lambda,
            max_iter: self.max_iter,
            reorth: self.reorth,
            diagnostics: self.diagnostics,
            ..Default::default()
        }
    }
}

/// 0 for convergence or exact termination, 2 for the condition limit, 3 for the iteration limit.
pub fn exit_code(reason: StopReason) -> i32 {
    match reason {
        StopReason::S3CondLimit => 2,
        StopReason::MaxIter => 3,
        _ => 0,
    }
}

fn load_problem(cfg: &SolveConfig) -> Result<(CsrMatrix, Vec<f64>)> {
    let mut a = read_matrix_market(&cfg.matrix)?;
    if cfg.rhs_mode == RhsMode::FromMatrixObjective {
        a = a.transpose();
    }
    let b = match cfg.rhs_mode {
        RhsMode::Ones => vec![1.0; a.nrows()],
        RhsMode::File | RhsMode::FromMatrixObjective => {
            let path = cfg.rhs.as_ref().ok_or_else(|| CliError::Usage("--rhs is required for this --rhs-mode".into()))?;
            read_vector(path)?
        }
    };
    if b.len() != a.nrows() {
        return Err(CliError::Usage(format!(
            "right-hand side has {} entries but the operator has {} rows",
            b.len(),
            a.nrows()
        )));
    }
    Ok((a, b))
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn summary(solver: &str, res: &SolveResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("solver".into(), json!(solver));
    m.insert("reason".into(), json!(res.reason.as_str()));
    m.insert("iterations".into(), json!(res.iterations));
    m.insert("normr".into(), json!(res.norm_r));
    m.insert("normAr".into(), json!(res.norm_atr));
    m.insert("normx".into(), json!(res.norm_x));
    m.insert("normA".into(), json!(res.norm_a));
    m.insert("cond".into(), json!(res.cond_a));
    m
}

/// Loads, optionally scales, solves, and writes the trace, solution and a
/// one-line JSON summary to `stdout`. Returns the process exit code.
pub fn run_solve(cfg: &SolveConfig, stdout: &mut dyn Write) -> Result<i32> {
    let opts = cfg.options();
    opts.validate()?;
    let (a, b) = load_problem(cfg)?;
    let (a, b, scaling) = if cfg.scale {
        let (a, b, report) = column_unit_scale(&a, &b)?;
        (a, b, Some(report))
    } else {
        (a, b, None)
    };
    let oracle = match (&cfg.trace, cfg.diagnostics) {
        (Some(_), true) => Oracle::new(&a, &b, cfg.lambda)?,
        _ => None,
    };

    let start = Instant::now();
    let (res, extra) = match cfg.solver {
        SolverKind::Lsmr | SolverKind::Lsqr => {
            let solve = |sink: &mut dyn TraceSink| match cfg.solver {
                SolverKind::Lsmr => lsmr_solve(&a, &b, &opts, sink),
                _ => lsqr_solve(&a, &b, &opts, sink),
            };
            let res = match &cfg.trace {
                Some(path) => {
                    let out = create(path)?;
                    let mut sink = CsvTrace::new(out, cfg.diagnostics, oracle).map_err(|e| CliError::io(path, e))?;
                    let res = solve(&mut sink)?;
                    sink.finish().map_err(|e| CliError::io(path, e))?;
                    res
                }
                None => solve(&mut NoTrace)?,
            };
            (res, None)
        }
        SolverKind::BothLockstep => {
            let mut csv = match &cfg.trace {
                Some(path) => Some(LockstepCsv::new(create(path)?, cfg.diagnostics, oracle).map_err(|e| CliError::io(path, e))?),
                None => None,
            };
            let mut write_err = None;
            let out = lockstep(&a, &b, &opts, |row, xm, xq| {
                if let (Some(csv), None) = (csv.as_mut(), write_err.as_ref()) {
                    if let Err(e) = csv.write_row(row, xm, xq) {
                        write_err = Some(e);
                    }
                }
            })?;
            if let (Some(e), Some(path)) = (write_err, &cfg.trace) {
                return Err(CliError::io(path, e));
            }
            (out.lsmr, Some(out.lsqr))
        }
    };
    let wall = start.elapsed().as_secs_f64();

    if let Some(path) = &cfg.solution {
        let x = match &scaling {
            Some(report) => report.unscale(&res.x),
            None => res.x.clone(),
        };
        write_vector(path, &x)?;
    }

    let mut obj = summary(cfg.solver.name(), &res);
    obj.insert("wall_seconds".into(), json!(wall));
    if let Some(lsqr) = &extra {
        let mut inner = summary("lsqr", lsqr);
        inner.remove("solver");
        obj.insert("lsqr".into(), Value::Object(inner));
    }
    writeln!(stdout, "{}", Value::Object(obj)).map_err(|e| CliError::io("<stdout>", e))?;
    Ok(exit_code(res.reason))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub spec: ProblemSpec,
    pub matrix_out: PathBuf,
    pub rhs_out: PathBuf,
}

/// Writes a seeded synthetic problem; the same seed always gives the same files.
pub fn run_generate(cfg: &GenerateConfig, stdout: &mut dyn Write) -> Result<i32> {
    let p = generate(&cfg.spec)?;
    write_matrix_market(&cfg.matrix_out, &p.csr())?;
    write_vector(&cfg.rhs_out, &p.b)?;
    let s = &cfg.spec;
    let obj = json!({
        "rows": s.rows,
        "cols": s.cols,
        "cond": s.cond,
        "rank": s.rank.unwrap_or(s.rows.min(s.cols)),
        "consistent": s.consistent,
        "seed": s.seed,
    });
    writeln!(stdout, "{obj}").map_err(|e| CliError::io("<stdout>", e))?;
    Ok(0)
}
