//! Driver layer of `wganlab`: experiment files, run orchestration, seed
//! sweeps with cross-seed aggregation, oracle verification suites and file
//! output.

pub mod aggregate;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod run;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
