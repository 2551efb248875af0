//! Command-line harness: generate test functions, run series operations and
//! the verification suites, and write reproducible reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use cli::{run, Cli};
pub use config::{Format, RunConfig};
pub use error::{CliError, Result};
