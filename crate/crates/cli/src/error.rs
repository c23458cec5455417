// SPDX-License-Identifier: MIT OR Apache-2.0

use rnsp_core::RnspError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    /// 2 for I/O and parse failures, 3 for invalid inputs or parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    pub(crate) fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<RnspError> for CliError {
    fn from(err: RnspError) -> Self {
        CliError::Validation(err.to_string())
    }
}
