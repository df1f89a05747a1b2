use std::path::PathBuf;

use rgg_envelope::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{count} starting vertices disagree with the solver beyond 3 standard errors")]
    McDisagreement { count: usize },

    #[error("run {run}: {empty} interior vertices have an empty annulus (sample too small for r)")]
    CoverageFailure { run: String, empty: usize },

    #[error("run {run}: {source}")]
    Core { run: String, source: CoreError },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn core(run: impl Into<String>, source: CoreError) -> Self {
        CliError::Core {
            run: run.into(),
            source,
        }
    }

    /// Process exit status for scripted pipelines.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigRead { .. } | CliError::ConfigParse(_) => 2,
            CliError::McDisagreement { .. } => 4,
            CliError::CoverageFailure { .. } => 5,
            CliError::Core { source, .. } => match source {
                CoreError::NonConvergence { .. } => 3,
                CoreError::MissingAnnulus { .. } => 5,
                CoreError::InvalidDimension(_)
                | CoreError::InvalidParameter(_)
                | CoreError::ScheduleUndefined(_) => 2,
                _ => 1,
            },
            CliError::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
