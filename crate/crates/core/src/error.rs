// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, RnspError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RnspError {
    #[error("series must contain at least 2 values; got {len}")]
    EmptyOrTooShort { len: usize },
    #[error("non-finite value at index {index} (1-based)")]
    NonFiniteValue { index: usize },
    #[error("interval [{s}, {e}] is out of range for length {n}")]
    IndexOutOfRange { s: usize, e: usize, n: usize },
    #[error("input of length {len} is too short; need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("interval [{s}, {e}] is degenerate; need e - s >= 1")]
    DegenerateInterval { s: usize, e: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series length {t} is too short for the analytic threshold; need T >= 3")]
    TooShortForAsymptotic { t: usize },
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("calibration grid is empty")]
    EmptyGrid,
}

impl RnspError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::InvalidConfig(msg.into())
    }
}
