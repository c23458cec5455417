// SPDX-License-Identifier: MIT OR Apache-2.0

//! Series ingestion from CSV or plain text.

use rnsp_core::{RnspError, Series};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// 1-based column to read; when absent every field on every line is a value.
    pub column: Option<usize>,
    /// Skip the first non-empty line.
    pub header: bool,
}

/// Parses `text` into a validated series. Errors name the offending line.
pub fn parse_series(text: &str, opts: CsvOptions) -> Result<Series, CliError> {
    let mut values = Vec::new();
    let mut origin = Vec::new();
    let mut skipped_header = !opts.header;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let selected: Vec<&str> = match opts.column {
            Some(k) => vec![*fields.get(k - 1).ok_or_else(|| {
                CliError::Parse(format!("line {line_no}: no column {k} in '{line}'"))
            })?],
            None => fields.into_iter().filter(|f| !f.is_empty()).collect(),
        };
        for field in selected {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Parse(format!(
                    "line {line_no}: cannot parse '{field}' as a number"
                ))
            })?;
            values.push(v);
            origin.push(line_no);
        }
    }
    Series::new(values).map_err(|e| match e {
        RnspError::NonFiniteValue { index } => CliError::Validation(format!(
            "line {}: non-finite value (observation {index})",
            origin[index - 1]
        )),
        other => CliError::Validation(other.to_string()),
    })
}
