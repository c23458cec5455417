// SPDX-License-Identifier: MIT OR Apache-2.0

//! The JSON report document and the auxiliary text outputs of `rnsp detect`.

use std::fmt::Write as _;

use rnsp_core::{DetectionConfig, DetectionReport, Series, ThresholdMethod};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub value: f64,
    pub method: ThresholdMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub s: usize,
    pub e: usize,
    pub length: usize,
    pub deviation: f64,
    pub best_level: f64,
    pub midpoint: usize,
}

/// Serialised result of one detection run. Regions keep discovery order and
/// use 1-based inclusive indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub input_digest: String,
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub threshold: ThresholdEntry,
    pub config: DetectionConfig,
    pub regions: Vec<RegionEntry>,
}

pub fn sha256_digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl ReportDocument {
    pub fn new(report: &DetectionReport, input: &[u8]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            input_digest: sha256_digest(input),
            t: report.t,
            alpha: report.config.alpha,
            threshold: ThresholdEntry {
                value: report.threshold,
                method: report.threshold_method,
            },
            config: report.config.clone(),
            regions: report
                .regions
                .iter()
                .map(|r| RegionEntry {
                    s: r.interval.s,
                    e: r.interval.e,
                    length: r.interval.len(),
                    deviation: r.deviation,
                    best_level: r.best_level,
                    midpoint: r.midpoint,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialises");
        out.push('\n');
        out
    }
}

pub fn summary_table(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "T = {}, alpha = {}, threshold = {:.4} ({})",
        doc.t, doc.alpha, doc.threshold.value, doc.threshold.method
    );
    if doc.regions.is_empty() {
        out.push_str("no intervals of significance\n");
        return out;
    }
    let _ = writeln!(
        out,
        "{:>3} {:>7} {:>7} {:>7} {:>9} {:>10}",
        "#", "s", "e", "length", "midpoint", "deviation"
    );
    for (i, r) in doc.regions.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>3} {:>7} {:>7} {:>7} {:>9} {:>10.4}",
            i + 1,
            r.s,
            r.e,
            r.length,
            r.midpoint,
            r.deviation
        );
    }
    out
}

/// CSV with columns `t,y,in_region`; `in_region` is 1 inside any region.
pub fn plot_data(series: &Series, doc: &ReportDocument) -> String {
    let mut out = String::from("t,y,in_region\n");
    for (i, y) in series.values().iter().enumerate() {
        let t = i + 1;
        let inside = doc.regions.iter().any(|r| r.s <= t && t <= r.e);
        let _ = writeln!(out, "{t},{y},{}", u8::from(inside));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::{parse_series, CsvOptions};
    use rnsp_core::{Interval, SignificanceRegion};

    fn doc() -> (Series, ReportDocument) {
        let series = Series::new(vec![0.1, -2.5e-7, 3.0, 1e10, 0.30000000000000004]).unwrap();
        let report = DetectionReport {
            regions: vec![SignificanceRegion::new(Interval::new(2, 4), 2.25, 3.0)],
            threshold: 1.5,
            threshold_method: ThresholdMethod::Override,
            config: DetectionConfig::default(),
            t: 5,
        };
        (series, ReportDocument::new(&report, b"abc"))
    }

    #[test]
    fn document_fields() {
        let (_, d) = doc();
        assert_eq!(d.schema_version, "1");
        assert_eq!(
            d.input_digest,
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(d.regions[0].length, 3);
        assert_eq!(d.regions[0].midpoint, 3);
        let back: ReportDocument = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn plot_data_round_trips() {
        let (series, d) = doc();
        let csv = plot_data(&series, &d);
        assert!(csv.starts_with("t,y,in_region\n1,0.1,0\n2,"));
        let opts = CsvOptions {
            column: Some(2),
            header: true,
        };
        assert_eq!(parse_series(&csv, opts).unwrap(), series);
        let flags: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap())
            .collect();
        assert_eq!(flags, ["0", "1", "1", "1", "0"]);
    }

    #[test]
    fn summary_mentions_regions() {
        let (_, d) = doc();
        let s = summary_table(&d);
        assert!(s.contains("override"));
        assert!(s.lines().count() == 3, "{s}");
    }
}
