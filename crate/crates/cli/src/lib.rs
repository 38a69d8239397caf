//! Library side of the `iqctl` runner: configuration schema, validation and
//! result writers.

pub mod config;
pub mod error;
pub mod run;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use run::{check, execute, load, Report, Status};
