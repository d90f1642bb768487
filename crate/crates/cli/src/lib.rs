//! Harness library behind the `qcl` binary: configuration parsing, dataset
//! generation, experiment execution, reporting, and figure emission.

pub mod config;
pub mod csv;
mod error;
pub mod plot;
pub mod report;
pub mod runner;

pub use error::{CliError, Result};
