use std::path::PathBuf;

use dagiso::IsoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Solver(#[from] IsoError),
}

impl BenchError {
    pub fn code(&self) -> &'static str {
        match self {
            BenchError::Io { .. } => "E_IO",
            BenchError::Parse { .. } => "E_PARSE",
            BenchError::Usage(_) => "E_USAGE",
            BenchError::Csv(_) | BenchError::Json(_) => "E_OUTPUT",
            BenchError::Solver(e) => e.code(),
        }
    }

    /// Process exit status: 2 for file and usage problems, 3 for malformed
    /// input, 1 for everything the solvers report.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Io { .. } | BenchError::Usage(_) | BenchError::Csv(_) | BenchError::Json(_) => 2,
            BenchError::Parse { .. } => 3,
            BenchError::Solver(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
