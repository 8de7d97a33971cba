//! Configuration, orchestration and output for the `reslab` driver.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{apply_overrides, run, Command, Overrides};
pub use config::RunConfig;
pub use error::{CliError, Result};
