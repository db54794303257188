//! File formats and the command-line driver around `lsmr-core`.

pub mod cli;
pub mod error;
pub mod generate;
pub mod mm;
pub mod reorth;
pub mod run;
pub mod trace;
pub mod vecio;

pub use error::{CliError, Result};
