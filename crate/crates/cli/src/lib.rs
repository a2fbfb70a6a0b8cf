//! The `schottky` command-line tool.
//!
//! Each run executes one command, writes one artifact (JSON for reports,
//! CSV for numeric sequences) and maps its outcome to an exit status:
//! 0 for a pass or a completed computation, 1 for a failure that comes with
//! a witness, 2 for bad input or I/O errors.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use thiserror::Error;

pub use commands::run;
pub use config::{Command, RunConfig};

pub const THREADS_ENV: &str = "SCHOTTKY_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] schottky_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    Pass,
    /// A check failed and the artifact holds the witness.
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: RunStatus,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Complete | RunStatus::Pass => 0,
            RunStatus::Fail => 1,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool configured earlier in the process keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let result = configure_threads().and_then(|()| RunConfig::from_args(args)).and_then(|config| run(&config));
    match result {
        Ok(outcome) => {
            log::info!("{}", outcome.summary);
            outcome.exit_code()
        }
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}
