use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lsmr_core::ReorthMode;

use crate::generate::ProblemSpec;
use crate::reorth::parse_reorth;
use crate::run::{run_generate, run_solve, GenerateConfig, RhsMode, SolveConfig, SolverKind};

#[derive(Debug, Parser)]
#[command(name = "lsmr", version, about = "Sparse least-squares solves with LSMR and LSQR")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve min ‖Ax − b‖² + λ²‖x‖² for a Matrix Market A.
    Solve(SolveArgs),
    /// Write a seeded random problem with a prescribed singular spectrum.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RhsMode::File)]
    pub rhs_mode: RhsMode,
    #[arg(long, value_enum, default_value_t = SolverKind::Lsmr)]
    pub solver: SolverKind,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub btol: f64,
    /// Condition limit; `inf` disables the test.
    #[arg(long, default_value_t = 1e8)]
    pub conlim: f64,
    /// Defaults to 4·min(m, n).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// none | v | u | both | local:<L> | restart:<L>
    #[arg(long, default_value = "none", value_parser = parse_reorth)]
    pub reorth: ReorthMode,
    /// Scale every column of A, and b, to unit 2-norm before solving.
    #[arg(long)]
    pub scale: bool,
    /// CSV file receiving one row per iteration.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// File receiving x, one value per line.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Add true residual norms and backward errors to the trace.
    #[arg(long)]
    pub diagnostics: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 1e3)]
    pub cond: f64,
    /// Number of nonzero singular values; defaults to full rank.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Put b in the range of A.
    #[arg(long)]
    pub consistent: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub matrix_out: PathBuf,
    #[arg(long)]
    pub rhs_out: PathBuf,
}

impl From<SolveArgs> for SolveConfig {
    fn from(a: SolveArgs) -> Self {
        SolveConfig {
            matrix: a.matrix,
            rhs: a.rhs,
            rhs_mode: a.rhs_mode,
            solver: a.solver,
            lambda: a.lambda,
            atol: a.atol,
            btol: a.btol,
            conlim: a.conlim,
            max_iter: a.max_iter,
            reorth: a.reorth,
            scale: a.scale,
            trace: a.trace,
            solution: a.solution,
            diagnostics: a.diagnostics,
        }
    }
}

impl From<GenerateArgs> for GenerateConfig {
    fn from(a: GenerateArgs) -> Self {
        GenerateConfig {
            spec: ProblemSpec {
                rows: a.rows,
                cols: a.cols,
                cond: a.cond,
                rank: a.rank,
                consistent: a.consistent,
                seed: a.seed,
            },
            matrix_out: a.matrix_out,
            rhs_out: a.rhs_out,
        }
    }
}

/// Parses `args` and runs the chosen subcommand. Usage and IO errors exit with 1.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args.into(), stdout),
        Command::Generate(args) => run_generate(&args.into(), stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
