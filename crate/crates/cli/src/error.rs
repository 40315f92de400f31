use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: invalid `{field}`: {reason}")]
    Field {
        path: String,
        field: String,
        reason: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("scenario is infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(#[from] edgeplan_core::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for an infeasible scenario, 1 for everything the user can fix in the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Infeasible(_) => 2,
            Self::Core(
                edgeplan_core::Error::Infeasible | edgeplan_core::Error::RoundsInfeasible { .. },
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
