//! Configuration, orchestration and artifact persistence for `dnls` runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;

pub use artifact::{verify_manifest, Certificate, RunArtifact};
pub use config::{Command, InitialData, RunConfig};
pub use error::CliError;
pub use run::{execute_run, execute_run_in, execute_sweep};
