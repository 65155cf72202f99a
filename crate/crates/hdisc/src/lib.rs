//! File formats, Hamiltonian generators and the experiment runner behind
//! the `hdisc` command-line tool.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod formats;
pub mod generators;
pub mod runner;

pub use config::{Command, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use runner::{run, Summary};
