// SPDX-License-Identifier: MIT OR Apache-2.0

//! The recursive RNSP search.
//!
//! On a segment `[s, e]` the engine draws sub-intervals (all of them when
//! there are at most `M`), computes each one's deviation from the constant
//! model, and keeps the shortest intervals whose deviation exceeds the
//! threshold, preferring the largest deviation among them. The winner is
//! narrowed by a second sampling pass inside it, the narrowed interval is
//! recorded, and the search recurses to its left and right.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviation::{DeviationEvaluator, DeviationResult};
use crate::error::{Result, RnspError};
use crate::model::{
    DetectionConfig, DetectionReport, Interval, Overlap, Sampling, Series, SignificanceRegion,
};
use crate::rng::ChaCha8Rng;
use crate::threshold::resolve_threshold;
use rand::SeedableRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exhaustive,
    Random,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSample {
    pub intervals: Vec<Interval>,
    pub provenance: Provenance,
}

/// Number of sub-intervals of length at least 2 in a segment of length `n`.
pub fn subinterval_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Draws the sub-intervals `[s_m, e_m]`, `s <= s_m < e_m <= e`, examined on
/// `parent`.
pub fn draw_intervals<R: Rng + ?Sized>(
    parent: Interval,
    m: usize,
    mode: Sampling,
    rng: &mut R,
) -> Result<IntervalSample> {
    let Interval { s, e } = parent;
    if e <= s {
        return Err(RnspError::DegenerateInterval { s, e });
    }
    if m >= subinterval_count(parent.len()) {
        let intervals = (s..e)
            .flat_map(|a| (a + 1..=e).map(move |b| Interval { s: a, e: b }))
            .collect();
        return Ok(IntervalSample {
            intervals,
            provenance: Provenance::Exhaustive,
        });
    }
    match mode {
        Sampling::Random => {
            let mut intervals = Vec::with_capacity(m);
            while intervals.len() < m {
                let a = rng.random_range(s..=e);
                let b = rng.random_range(s..=e);
                if a != b {
                    intervals.push(Interval {
                        s: a.min(b),
                        e: a.max(b),
                    });
                }
            }
            Ok(IntervalSample {
                intervals,
                provenance: Provenance::Random,
            })
        }
        Sampling::Grid => {
            let points = grid_points(parent, m);
            let intervals = points
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| {
                    points[i + 1..]
                        .iter()
                        .map(move |&b| Interval { s: a, e: b })
                })
                .collect();
            Ok(IntervalSample {
                intervals,
                provenance: Provenance::Grid,
            })
        }
    }
}

/// Smallest `K` with `K (K - 1) / 2 >= m`.
pub fn grid_size(m: usize) -> usize {
    let mut k = 2;
    while subinterval_count(k) < m {
        k += 1;
    }
    k
}

/// `K` points from rounding the affine map of `0..K` onto `[s, e]`.
pub fn grid_points(parent: Interval, m: usize) -> Vec<usize> {
    let k = grid_size(m).min(parent.len());
    let span = (parent.e - parent.s) as f64;
    let mut points: Vec<usize> = (0..k)
        .map(|i| parent.s + (span * i as f64 / (k - 1) as f64).round() as usize)
        .collect();
    points.dedup();
    points
}

/// Index of the chosen interval: among those with deviation above `lambda`,
/// the shortest, then the largest deviation, then smallest `s`, then
/// smallest `e`. `None` when nothing exceeds `lambda`.
pub fn select_candidate(sample: &[Interval], deviations: &[f64], lambda: f64) -> Option<usize> {
    debug_assert_eq!(sample.len(), deviations.len());
    let mut best: Option<usize> = None;
    for (i, (iv, &d)) in sample.iter().zip(deviations).enumerate() {
        if d <= lambda {
            continue;
        }
        let better = match best {
            None => true,
            Some(j) => {
                let (bj, dj) = (sample[j], deviations[j]);
                (iv.len(), std::cmp::Reverse(OrdF64(d)), iv.s, iv.e)
                    < (bj.len(), std::cmp::Reverse(OrdF64(dj)), bj.s, bj.e)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The overlap functions `tau_L`, `tau_R` deciding where the child searches
/// start and end relative to a detected interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverlapRule {
    pub mode: Overlap,
}

impl OverlapRule {
    pub fn new(mode: Overlap) -> Self {
        Self { mode }
    }

    pub fn tau_left(&self, detected: Interval) -> usize {
        match self.mode {
            Overlap::None => 0,
            Overlap::Midpoint => detected.midpoint() - detected.s,
        }
    }

    /// `tau_R` is non-positive; this returns its magnitude.
    pub fn tau_right_magnitude(&self, detected: Interval) -> usize {
        match self.mode {
            Overlap::None => 0,
            Overlap::Midpoint => detected.e - detected.midpoint() - 1,
        }
    }

    /// Left and right child segments `[s, s~ + tau_L]` and `[e~ - tau_R, e]`.
    pub fn children(&self, parent: Interval, detected: Interval) -> (Interval, Interval) {
        let left_end = detected.s + self.tau_left(detected);
        let right_start = detected.e - self.tau_right_magnitude(detected);
        (
            Interval {
                s: parent.s,
                e: left_end,
            },
            Interval {
                s: right_start,
                e: parent.e,
            },
        )
    }
}

/// One detection run over a fixed series.
pub struct Engine<'a> {
    series: &'a Series,
    config: &'a DetectionConfig,
    lambda: f64,
    overlap: OverlapRule,
    evaluator: DeviationEvaluator,
    rng: ChaCha8Rng,
}

impl<'a> Engine<'a> {
    pub fn new(series: &'a Series, config: &'a DetectionConfig, lambda: f64) -> Self {
        Self {
            series,
            config,
            lambda,
            overlap: OverlapRule::new(config.overlap),
            evaluator: DeviationEvaluator::new(series.len()),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }

    fn deviations(&self, intervals: &[Interval]) -> Vec<DeviationResult> {
        intervals
            .par_iter()
            .map(|&iv| {
                self.evaluator
                    .evaluate(self.series.segment(iv), self.config.max_len)
                    .expect("sampled intervals have length >= 2")
            })
            .collect()
    }

    /// Lines 2-18 of the search on `parent`: sample, evaluate, select.
    fn pick(
        &mut self,
        parent: Interval,
        force: bool,
    ) -> Result<Option<(Interval, DeviationResult)>> {
        let mut sample =
            draw_intervals(parent, self.config.m, self.config.sampling, &mut self.rng)?;
        if force && sample.provenance != Provenance::Exhaustive {
            sample.intervals.push(parent);
        }
        let results = self.deviations(&sample.intervals);
        let values: Vec<f64> = results.iter().map(|r| r.d_value).collect();
        Ok(select_candidate(&sample.intervals, &values, self.lambda)
            .map(|i| (sample.intervals[i], results[i])))
    }

    /// Narrows a significant candidate to its shortest significant
    /// sub-interval found by one further sampling pass.
    pub fn shortest_significant_subinterval(
        &mut self,
        candidate: Interval,
        deviation: DeviationResult,
    ) -> Result<(Interval, DeviationResult)> {
        if candidate.len() <= 2 {
            return Ok((candidate, deviation));
        }
        Ok(self
            .pick(candidate, true)?
            .unwrap_or((candidate, deviation)))
    }

    pub fn recurse(&mut self, segment: Interval, out: &mut Vec<SignificanceRegion>) -> Result<()> {
        if segment.e <= segment.s {
            return Ok(());
        }
        let Some((candidate, deviation)) = self.pick(segment, false)? else {
            return Ok(());
        };
        let (found, dev) = self.shortest_significant_subinterval(candidate, deviation)?;
        out.push(SignificanceRegion::new(
            found,
            dev.d_value,
            dev.best_level
                .expect("significant intervals are never gated"),
        ));
        let (left, right) = self.overlap.children(segment, found);
        self.recurse(left, out)?;
        self.recurse(right, out)
    }
}

/// Runs RNSP on `series` and returns the intervals of significance.
pub fn detect(series: &Series, config: &DetectionConfig) -> Result<DetectionReport> {
    config.validate()?;
    let threshold = resolve_threshold(series.len(), config)?;
    let mut regions = Vec::new();
    Engine::new(series, config, threshold.value).recurse(series.full_interval(), &mut regions)?;
    Ok(DetectionReport {
        regions,
        threshold: threshold.value,
        threshold_method: threshold.method,
        config: config.clone(),
        t: series.len(),
    })
}
