//! Command-line front end for `fiberpair-core`: TOML run configuration, CSV
//! tables, sweeps and a multi-threaded simulation driver.

pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod report;
pub mod table;

pub use error::{CliError, Result};
