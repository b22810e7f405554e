//! Command-line front end for `nfg-core`: JSON model specs, figure runners
//! that write CSV, and the validation suite.

pub mod commands;
pub mod error;
pub mod experiments;
pub mod report;
pub mod spec;
pub mod suite;

pub use error::{CliError, CliResult};

/// Master seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;
