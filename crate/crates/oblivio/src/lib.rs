//! File formats and the command-line front end for `oblivio-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod report;

pub use commands::{execute, Output};
pub use error::{CliError, Result};
