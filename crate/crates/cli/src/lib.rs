//! Command-line front end for the `cuspsum-core` experiments and bound
//! calculators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;
pub mod tables;

use cuspsum_core::Error as CoreError;

pub use config::{parse_config, Command, Format, Job, RunConfig};
pub use run::{run, run_to};

/// Environment variable naming the coefficient cache directory.
pub const CACHE_DIR_ENV: &str = "CUSPSUM_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CRITERION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Criterion(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Criterion(_) => EXIT_CRITERION,
            CliError::Core(e) => match e {
                CoreError::InvalidArgument { .. }
                | CoreError::NotCoprime { .. }
                | CoreError::DegenerateFit(_)
                | CoreError::Infeasible(_)
                | CoreError::DimensionMismatch { .. } => EXIT_USAGE,
                CoreError::TableTooShort { .. }
                | CoreError::Budget { .. }
                | CoreError::Cache { .. }
                | CoreError::Rejected(_)
                | CoreError::Io(_) => EXIT_RESOURCE,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Resource(e.to_string())
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to stderr.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|c| run(&c));
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("cuspsum: {e}");
            e.exit_code()
        }
    }
}
