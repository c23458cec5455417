// SPDX-License-Identifier: MIT OR Apache-2.0

//! Robust narrowest significance pursuit (RNSP).
//!
//! Given a univariate sequence, RNSP returns the shortest intervals that must
//! each contain a change in the median, at a prescribed global significance
//! level. The only assumptions on the noise are sign-symmetry around zero and
//! serial independence of the noise signs; heavy tails, heterogeneity and
//! mass points are all permitted.
//!
//! The building blocks are:
//!
//! * [`norm`]: scaled partial sums and multiresolution sup-norms of sign vectors,
//! * [`deviation`]: the deviation of a segment from the best constant median fit,
//! * [`threshold`]: the global significance threshold `lambda_alpha`,
//! * [`engine`]: the recursive interval search producing a [`DetectionReport`],
//! * [`sim`]: simulation models and coverage metrics.

#![forbid(unsafe_code)]

pub mod deviation;
pub mod engine;
mod error;
pub mod model;
pub mod norm;
pub mod rng;
pub mod sim;
pub mod threshold;

pub use deviation::{deviation_from_constant_model, CandidateLevels, DeviationResult};
pub use engine::{detect, IntervalSample, OverlapRule, Provenance};
pub use error::{Result, RnspError};
pub use model::{
    validate_series, DetectionConfig, DetectionReport, Interval, Overlap, Sampling, Series,
    SignificanceRegion,
};
pub use norm::{msup_norm_all, msup_norm_lr, PrefixSums, SignVector};
pub use sim::{evaluate_run, run_experiment, ExperimentRow, Model, RunMetrics};
pub use threshold::{lambda_alpha, mc_norm_quantile, ThresholdMethod, ThresholdSpec};
