// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Process exit code for a bad configuration or command line.
pub const EXIT_INVALID_CONFIG: i32 = 2;
/// Process exit code when the model refuses a result as numerically invalid.
pub const EXIT_NUMERICAL: i32 = 3;
/// Process exit code for I/O failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    ConfigLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("estimated peak memory {bytes} bytes exceeds {limit} bytes; pass --allow-large to run anyway")]
    TooLarge { bytes: u64, limit: u64 },

    #[error(transparent)]
    Model(#[from] kerrsim_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use kerrsim_core::Error as E;
        match self {
            CliError::Config(_) | CliError::ConfigLine { .. } | CliError::TooLarge { .. } => EXIT_INVALID_CONFIG,
            CliError::Model(E::OutOfRange { .. }) => EXIT_INVALID_CONFIG,
            CliError::Model(_) => EXIT_NUMERICAL,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
