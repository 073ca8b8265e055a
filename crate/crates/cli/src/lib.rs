//! Configuration, orchestration and serialization behind the `epstein` binary.
//!
//! A run is a validated [`ExperimentConfig`] plus a [`Command`]; [`dispatch`]
//! writes the artifacts and reports failures as [`CliError`]s that carry
//! distinct exit codes.

// Per-node loops index several parallel arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod run;
pub mod verify;

pub use config::{ConfigMode, ExperimentConfig, Suite};
pub use error::CliError;
pub use run::{dispatch, fuchsian_row, Command, Outcome, ARTIFACT_VERSION};
