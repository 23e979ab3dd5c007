//! Scenario files, reports and the command pipelines behind the `osaas`
//! binary.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod report;
pub mod scenario_file;

pub use error::{CliError, Result};
