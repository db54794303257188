use core::fmt;

/// Errors reported by operators, solvers and dense oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix had the wrong length along some dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Structural invariant of a sparse matrix was violated.
    InvalidMatrix(&'static str),
    /// Solver options outside their valid range.
    InvalidOptions(&'static str),
    /// Column `column` of the matrix has zero 2-norm and cannot be scaled.
    ZeroColumn { column: usize },
    /// Right-hand side has zero 2-norm and cannot be scaled.
    ZeroRhs,
    /// Storing another basis vector would exceed the reorthogonalization cap.
    ReorthMemoryCap { needed: usize, cap: usize },
    /// NaN or infinity appeared in the recurrence scalars.
    NonFinite { iteration: usize },
    /// Triangular factor has a negligible diagonal.
    Singular { index: usize },
    /// Jacobi SVD did not converge within the sweep cap.
    NoConvergence { sweeps: usize },
    /// Backward-error estimate requested for x = 0.
    ZeroSolution,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidMatrix(msg) => write!(f, "invalid matrix: {msg}"),
            Error::InvalidOptions(msg) => write!(f, "invalid solver options: {msg}"),
            Error::ZeroColumn { column } => {
                write!(f, "column {column} has zero norm and cannot be scaled")
            }
            Error::ZeroRhs => f.write_str("right-hand side is zero and cannot be scaled"),
            Error::ReorthMemoryCap { needed, cap } => write!(
                f,
                "reorthogonalization basis needs {needed} floats, exceeding the cap of {cap}"
            ),
            Error::NonFinite { iteration } => {
                write!(f, "non-finite value in recurrence at iteration {iteration}")
            }
            Error::Singular { index } => {
                write!(f, "triangular factor is numerically singular at diagonal {index}")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "Jacobi SVD did not converge after {sweeps} sweeps")
            }
            Error::ZeroSolution => f.write_str("backward error is undefined for x = 0"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

#[inline]
pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
