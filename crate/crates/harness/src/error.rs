use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] bilinop_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    WriteReport {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    ParseConfig(#[source] serde_json::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

impl HarnessError {
    /// 2 for anything that stopped the run before it could start, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use bilinop_core::Error as E;
        match self {
            HarnessError::Core(E::Io(_) | E::Csv(_)) => 1,
            HarnessError::Core(_)
            | HarnessError::Config(_)
            | HarnessError::ReadConfig { .. }
            | HarnessError::ParseConfig(_) => 2,
            HarnessError::WriteReport { .. }
            | HarnessError::Json(_)
            | HarnessError::Io(_)
            | HarnessError::Csv(_) => 1,
        }
    }
}
