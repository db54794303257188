//! Matrix-free solvers for sparse least squares.
//!
//! [`lsmr::lsmr_solve`] handles `min ‖Ax − b‖`, minimum-norm and
//! Tikhonov-damped problems through any [`linop::LinearOperator`]. It reports
//! running estimates of `‖r‖`, `‖Aᵀr‖`, `‖x‖`, `‖A‖` and `cond(A)` at no extra
//! product cost. [`lsqr`] is the classical counterpart on the same
//! bidiagonalization, and [`backerr`] holds backward-error measures plus
//! dense reference solvers.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod backerr;
pub mod error;
pub mod gk;
pub mod linop;
pub mod lockstep;
pub mod lsmr;
pub mod lsqr;
mod math;
pub mod vecops;

pub use error::{Error, Result};
pub use gk::ReorthMode;
pub use linop::{CsrMatrix, DenseMatrix, LinearOperator};
pub use lsmr::{lsmr_solve, IterationRecord, SolveOptions, SolveResult, StopReason, TraceSink};
pub use lsqr::lsqr_solve;
