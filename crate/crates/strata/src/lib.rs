//! Command-line pipelines for population-level FRF modelling: synthetic
//! data generation, H1 spectral estimation, hierarchical posterior
//! fitting, temperature extrapolation, and convergence reporting.
//!
//! Exposed as a library so integration tests can drive the exact
//! subcommand entry points in-process.

pub mod config;
pub mod csv;
pub mod diagnose;
pub mod error;
pub mod estimate;
pub mod fit;
pub mod predict;
pub mod simulate;

pub use config::RunConfig;
pub use error::CliError;
