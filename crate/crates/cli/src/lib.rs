//! Experiment harness around the `l0recov-core` sparse-recovery library:
//! configuration parsing, file formats, deterministic multi-seed trial
//! orchestration and the command implementations behind the `l0recov`
//! binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod fmt;
pub mod io;
pub mod trial;

pub use config::RunConfig;
pub use error::CliError;
