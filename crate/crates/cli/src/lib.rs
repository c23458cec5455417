// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command implementations behind the `rnsp` binary.

#![forbid(unsafe_code)]

pub mod commands;
pub mod error;
pub mod input;
pub mod report;

pub use commands::{run, Cli};
pub use error::CliError;
