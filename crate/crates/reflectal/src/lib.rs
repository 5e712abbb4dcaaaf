//! Command-line workflow around `reflectal-core`: JSON run configs with
//! unit-annotated quantities, curve-table ingestion, CSV artifacts and a
//! worker pool for frequency scans.
//!
//! The binary exposes `eigen`, `manifold`, `scan` and `propagate`; each is
//! also callable as a library function in [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_eigen, cmd_manifold, cmd_propagate, cmd_scan, RunOptions, RunSummary};
pub use config::RunConfig;
pub use error::CliError;
