// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared domain types.
//!
//! Indices are 1-based and intervals are closed on both ends throughout the
//! crate; conversion to 0-based slices happens only inside accessors such as
//! [`Series::segment`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, RnspError};
use crate::threshold::ThresholdMethod;

/// A validated observation sequence: finite values, length at least 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(RnspError::EmptyOrTooShort { len: values.len() });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(RnspError::NonFiniteValue { index: pos + 1 });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at 1-based position `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// The observations `Y_s, ..., Y_e` for a 1-based closed interval.
    pub fn segment(&self, interval: Interval) -> &[f64] {
        &self.values[interval.s - 1..interval.e]
    }

    pub fn full_interval(&self) -> Interval {
        Interval::new(1, self.len())
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = RnspError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(series: Series) -> Self {
        series.values
    }
}

pub fn validate_series(raw: &[f64]) -> Result<Series> {
    Series::new(raw.to_vec())
}

/// Closed integer interval `[s, e]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub s: usize,
    pub e: usize,
}

impl Interval {
    /// Panics if `s == 0` or `s > e`.
    pub fn new(s: usize, e: usize) -> Self {
        assert!(s >= 1 && s <= e, "invalid interval [{s}, {e}]");
        Self { s, e }
    }

    pub fn checked(s: usize, e: usize, n: usize) -> Result<Self> {
        if s == 0 || s > e || e > n {
            return Err(RnspError::IndexOutOfRange { s, e, n });
        }
        Ok(Self { s, e })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn midpoint(&self) -> usize {
        (self.s + self.e) / 2
    }

    pub fn contains(&self, other: Interval) -> bool {
        self.s <= other.s && other.e <= self.e
    }

    /// True when `[eta, eta + 1]` lies inside the interval, i.e. a change
    /// between positions `eta` and `eta + 1` is covered.
    pub fn covers_change_at(&self, eta: usize) -> bool {
        self.s <= eta && eta < self.e
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.s, self.e)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Interval endpoints drawn uniformly with replacement.
    #[default]
    Random,
    /// All pairs of points from an approximately equispaced grid.
    Grid,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlap {
    /// Children are `[s, s~]` and `[e~, e]`.
    #[default]
    None,
    /// Children extend to the detected interval's midpoint.
    Midpoint,
}

impl std::str::FromStr for Sampling {
    type Err = RnspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "grid" => Ok(Self::Grid),
            other => Err(RnspError::config(format!(
                "unknown sampling mode '{other}'; expected 'random' or 'grid'"
            ))),
        }
    }
}

impl std::str::FromStr for Overlap {
    type Err = RnspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "midpoint" => Ok(Self::Midpoint),
            other => Err(RnspError::config(format!(
                "unknown overlap mode '{other}'; expected 'none' or 'midpoint'"
            ))),
        }
    }
}

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_M: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub alpha: f64,
    /// Minimum number of sub-intervals drawn per recursive call.
    #[serde(rename = "M")]
    pub m: usize,
    pub sampling: Sampling,
    pub overlap: Overlap,
    /// Deviations of intervals with `e - s > max_len` are forced to zero.
    pub max_len: Option<usize>,
    pub seed: u64,
    pub threshold_override: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            m: DEFAULT_M,
            sampling: Sampling::Random,
            overlap: Overlap::None,
            max_len: None,
            seed: 0,
            threshold_override: None,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(RnspError::config(format!(
                "alpha must lie in (0,1); got {}",
                self.alpha
            )));
        }
        if self.m == 0 {
            return Err(RnspError::config("M must be >= 1"));
        }
        if let Some(l) = self.max_len {
            if l < 2 {
                return Err(RnspError::config(format!("max_len must be >= 2; got {l}")));
            }
        }
        if let Some(x) = self.threshold_override {
            if !(x.is_finite() && x > 0.0) {
                return Err(RnspError::config(format!(
                    "threshold override must be a positive finite number; got {x}"
                )));
            }
        }
        Ok(())
    }
}

/// A returned interval of significance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRegion {
    pub interval: Interval,
    pub deviation: f64,
    /// The candidate constant attaining the minimum deviation.
    pub best_level: f64,
    pub midpoint: usize,
}

impl SignificanceRegion {
    pub fn new(interval: Interval, deviation: f64, best_level: f64) -> Self {
        Self {
            interval,
            deviation,
            best_level,
            midpoint: interval.midpoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Regions in order of discovery.
    pub regions: Vec<SignificanceRegion>,
    pub threshold: f64,
    pub threshold_method: ThresholdMethod,
    pub config: DetectionConfig,
    #[serde(rename = "T")]
    pub t: usize,
}

impl DetectionReport {
    pub fn intervals(&self) -> Vec<Interval> {
        self.regions.iter().map(|r| r.interval).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_accepts_finite_values() {
        let s = validate_series(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.at(1), 1.0);
    }

    #[test]
    fn validate_rejects_short_input() {
        assert_eq!(
            validate_series(&[1.0]),
            Err(RnspError::EmptyOrTooShort { len: 1 })
        );
        assert_eq!(
            validate_series(&[]),
            Err(RnspError::EmptyOrTooShort { len: 0 })
        );
    }

    #[test]
    fn validate_reports_first_non_finite_index() {
        assert_eq!(
            validate_series(&[1.0, f64::NAN]),
            Err(RnspError::NonFiniteValue { index: 2 })
        );
        assert_eq!(
            validate_series(&[1.0, 2.0, f64::INFINITY, f64::NAN]),
            Err(RnspError::NonFiniteValue { index: 3 })
        );
    }

    #[test]
    fn series_deserialisation_is_validated() {
        let bad: std::result::Result<Series, _> = serde_json::from_str("[1.0]");
        assert!(bad.is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DetectionConfig::default().validate().is_ok());
        let bad_alpha = DetectionConfig {
            alpha: 1.5,
            ..Default::default()
        };
        let err = bad_alpha.validate().unwrap_err().to_string();
        assert!(err.contains("alpha must lie in (0,1)"), "{err}");
        let bad_m = DetectionConfig {
            m: 0,
            ..Default::default()
        };
        assert!(bad_m.validate().is_err());
        let bad_len = DetectionConfig {
            max_len: Some(1),
            ..Default::default()
        };
        assert!(bad_len.validate().is_err());
    }

    #[test]
    fn midpoint_floors() {
        assert_eq!(Interval::new(23, 75).midpoint(), 49);
        assert_eq!(Interval::new(65, 91).midpoint(), 78);
        assert_eq!(Interval::new(4, 5).midpoint(), 4);
    }

    #[test]
    fn change_coverage_needs_both_sides() {
        let iv = Interval::new(23, 75);
        assert!(iv.covers_change_at(50));
        assert!(iv.covers_change_at(23));
        assert!(iv.covers_change_at(74));
        assert!(!iv.covers_change_at(75));
        assert!(!iv.covers_change_at(22));
    }

    #[test]
    fn report_serde_round_trip() {
        let report = DetectionReport {
            regions: vec![
                SignificanceRegion::new(Interval::new(23, 75), 3.51234567891, 0.1),
                SignificanceRegion::new(Interval::new(65, 91), 4.0 / 3.0, -2.75),
            ],
            threshold: 3.3741831520566294,
            threshold_method: ThresholdMethod::Analytic,
            config: DetectionConfig {
                overlap: Overlap::Midpoint,
                max_len: Some(40),
                seed: u64::MAX,
                ..Default::default()
            },
            t: 103,
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: DetectionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    proptest! {
        #[test]
        fn interval_length_round_trips(s in 1usize..500, extra in 0usize..500) {
            let e = s + extra;
            let iv = Interval::new(s, e);
            prop_assert_eq!(iv.len(), e - s + 1);
            prop_assert!(Interval::checked(s, e, e).is_ok());
            prop_assert!(Interval::checked(s, e + 1, e).is_err());
        }
    }
}
