// SPDX-License-Identifier: MIT OR Apache-2.0

//! Deviation of a segment from the constant median model.
//!
//! A segment is compared against every constant that produces a distinct
//! residual sign pattern: one level below the minimum, every distinct data
//! value, every midpoint between consecutive distinct values and one level
//! above the maximum. For each level the residual signs (with `sign(0) = 0`)
//! are scored with the left/right multiresolution sup-norm, and the deviation
//! is the smallest score. Trying every level is what makes the deviation of
//! a change-free segment bounded by the norm of its true noise signs.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RnspError};
use crate::norm::{msup_norm_lr, sign, SignVector};

/// Strictly increasing candidate constants for one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLevels(Vec<f64>);

impl CandidateLevels {
    pub fn levels(&self) -> &[f64] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationResult {
    pub d_value: f64,
    /// Minimising level; `None` when the length gate applied.
    pub best_level: Option<f64>,
    pub gated: bool,
}

impl DeviationResult {
    fn gated() -> Self {
        Self {
            d_value: 0.0,
            best_level: None,
            gated: true,
        }
    }
}

/// A value strictly below `x`. `x - 1` unless that rounds back to `x`.
fn strictly_below(x: f64) -> f64 {
    let y = x - 1.0;
    if y < x {
        y
    } else if x > 0.0 {
        x / 2.0
    } else {
        x * 2.0
    }
}

fn strictly_above(x: f64) -> f64 {
    -strictly_below(-x)
}

fn sorted_distinct(y: &[f64]) -> Vec<f64> {
    let mut v = y.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| a == b);
    v
}

fn check_len(y: &[f64]) -> Result<()> {
    if y.len() < 2 {
        return Err(RnspError::TooShort {
            len: y.len(),
            min: 2,
        });
    }
    Ok(())
}

/// The deduplicated, sorted candidate constants for `y`.
pub fn candidate_levels(y: &[f64]) -> Result<CandidateLevels> {
    check_len(y)?;
    let distinct = sorted_distinct(y);
    let mut levels = Vec::with_capacity(2 * distinct.len() + 1);
    let mut push = |v: f64| {
        if levels.last().is_none_or(|&last| v > last) {
            levels.push(v);
        }
    };
    push(strictly_below(distinct[0]));
    for (i, &v) in distinct.iter().enumerate() {
        push(v);
        if let Some(&next) = distinct.get(i + 1) {
            push((v + next) / 2.0);
        }
    }
    push(strictly_above(distinct[distinct.len() - 1]));
    Ok(CandidateLevels(levels))
}

/// `sign(y_t - level)` with exact floating-point comparison.
pub fn sign_residuals(y: &[f64], level: f64) -> SignVector {
    SignVector::from_raw(y.iter().map(|&v| sign(v - level)).collect())
}

fn is_gated(n: usize, max_len: Option<usize>) -> bool {
    max_len.is_some_and(|l| n > l + 1)
}

/// Straightforward evaluation: every candidate level in increasing order, each
/// sign vector rebuilt from scratch. Kept as the reference for
/// [`deviation_from_constant_model`], which must agree with it bit for bit.
pub fn deviation_exhaustive(y: &[f64], max_len: Option<usize>) -> Result<DeviationResult> {
    check_len(y)?;
    if is_gated(y.len(), max_len) {
        return Ok(DeviationResult::gated());
    }
    let levels = candidate_levels(y)?;
    min_norm_over_levels(y, levels.levels())
}

/// Smallest left/right norm of `sign(y - level)` over `levels`, ties going to
/// the earliest level in the slice.
pub(crate) fn min_norm_over_levels(y: &[f64], levels: &[f64]) -> Result<DeviationResult> {
    let mut best: Option<(f64, f64)> = None;
    for &level in levels {
        let norm = msup_norm_lr(&sign_residuals(y, level))?;
        if best.is_none_or(|(b, _)| norm < b) {
            best = Some((norm, level));
        }
    }
    let (d_value, level) = best.ok_or(RnspError::EmptyGrid)?;
    Ok(DeviationResult {
        d_value,
        best_level: Some(level),
        gated: false,
    })
}

/// Deviation `D` of `y` from the best constant fit.
///
/// Returns zero (flagged `gated`) when `max_len` is set and the segment spans
/// `e - s > max_len`.
pub fn deviation_from_constant_model(y: &[f64], max_len: Option<usize>) -> Result<DeviationResult> {
    DeviationEvaluator::new(y.len()).evaluate(y, max_len)
}

/// Evaluates deviations for segments of bounded length, sharing a square-root
/// table between calls.
///
/// Each candidate level is encoded through the rank of the data: with `r_t`
/// the 0-based rank of `y_t` among the distinct values, level index `l` runs
/// over `0..=2K` (below, at value 0, between 0 and 1, ..., above) and
/// `sign(y_t - level_l) = sign(2 r_t + 1 - l)`. Levels are visited in order
/// of the whole-segment lower bound `|sum| / sqrt(n)` and abandoned as soon as
/// their running maximum can no longer beat the best level found so far.
#[derive(Debug, Clone)]
pub struct DeviationEvaluator {
    roots: Vec<f64>,
}

struct LevelCandidate {
    index: usize,
    value: f64,
    bound: f64,
}

impl DeviationEvaluator {
    pub fn new(max_n: usize) -> Self {
        Self {
            roots: (0..=max_n).map(|k| (k as f64).sqrt()).collect(),
        }
    }

    pub fn evaluate(&self, y: &[f64], max_len: Option<usize>) -> Result<DeviationResult> {
        check_len(y)?;
        let n = y.len();
        if is_gated(n, max_len) {
            return Ok(DeviationResult::gated());
        }
        assert!(
            n < self.roots.len(),
            "segment longer than evaluator capacity"
        );

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap_or(Ordering::Equal));
        let mut keys = vec![0i32; n];
        let mut distinct: Vec<f64> = Vec::with_capacity(n);
        let mut counts: Vec<usize> = Vec::with_capacity(n);
        for &t in &order {
            if distinct.last() != Some(&y[t]) {
                distinct.push(y[t]);
                counts.push(0);
            }
            let rank = distinct.len() - 1;
            counts[rank] += 1;
            keys[t] = 2 * rank as i32 + 1;
        }
        let k = distinct.len();

        // below[r] = number of points with rank < r
        let mut below = Vec::with_capacity(k + 1);
        let mut acc = 0usize;
        below.push(0);
        for &c in &counts {
            acc += c;
            below.push(acc);
        }

        let mut candidates = Vec::with_capacity(2 * k + 1);
        for index in 0..=2 * k {
            let value = if index == 0 {
                strictly_below(distinct[0])
            } else if index == 2 * k {
                strictly_above(distinct[k - 1])
            } else if index % 2 == 1 {
                distinct[(index - 1) / 2]
            } else {
                let (a, b) = (distinct[index / 2 - 1], distinct[index / 2]);
                let mid = (a + b) / 2.0;
                if !(a < mid && mid < b) {
                    continue;
                }
                mid
            };
            // points strictly below and strictly above this level
            let (minus, plus) = if index % 2 == 1 {
                let r = (index - 1) / 2;
                (below[r], n - below[r + 1])
            } else {
                let r = index / 2;
                (below[r], n - below[r])
            };
            let total = plus as f64 - minus as f64;
            candidates.push(LevelCandidate {
                index,
                value,
                bound: total.abs() / self.roots[n],
            });
        }
        candidates.sort_by(|a, b| {
            a.bound
                .partial_cmp(&b.bound)
                .unwrap_or(Ordering::Equal)
                .then(a.index.cmp(&b.index))
        });

        let mut best = f64::INFINITY;
        let mut best_index = usize::MAX;
        let mut best_value = f64::NAN;
        for cand in &candidates {
            if cand.bound > best || (cand.bound == best && cand.index > best_index) {
                // bounds are sorted, so nothing later can win either
                if cand.bound > best {
                    break;
                }
                continue;
            }
            if let Some(norm) =
                self.level_norm(&keys, cand.index as i32, best, cand.index > best_index)
            {
                if norm < best || (norm == best && cand.index < best_index) {
                    best = norm;
                    best_index = cand.index;
                    best_value = cand.value;
                }
            }
        }
        Ok(DeviationResult {
            d_value: best,
            best_level: Some(best_value),
            gated: false,
        })
    }

    /// Left/right norm for one level, or `None` once it is known to lose
    /// against `cutoff` (losing ties when `lose_ties`).
    fn level_norm(&self, keys: &[i32], level: i32, cutoff: f64, lose_ties: bool) -> Option<f64> {
        let n = keys.len();
        let loses = |m: f64| m > cutoff || (lose_ties && m == cutoff);
        let mut max = 0.0f64;
        let mut sum = i64::from((keys[0] - level).signum());
        for (j, &key) in keys.iter().enumerate().skip(1) {
            sum += i64::from((key - level).signum());
            let v = (sum as f64).abs() / self.roots[j + 1];
            if v > max {
                max = v;
                if loses(max) {
                    return None;
                }
            }
        }
        let mut sum = i64::from((keys[n - 1] - level).signum());
        for (j, &key) in keys.iter().rev().enumerate().skip(1) {
            sum += i64::from((key - level).signum());
            let v = (sum as f64).abs() / self.roots[j + 1];
            if v > max {
                max = v;
                if loses(max) {
                    return None;
                }
            }
        }
        Some(max)
    }
}
