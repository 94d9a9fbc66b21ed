//! File formats, configuration and the `msland` command line around
//! `msland-core`.

pub mod artifact;
pub mod cashflow_file;
pub mod cli;
pub mod cohort_file;
pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;

pub use commands::{run, Command, Outcome};
pub use config::RunConfig;
pub use error::CliError;
