// SPDX-License-Identifier: MIT OR Apache-2.0

//! The global significance threshold `lambda_alpha`.
//!
//! Under the null, residual signs are Rademacher and the sup-norm of a
//! length-`T` Rademacher vector over all sub-intervals satisfies
//!
//! ```text
//! P(norm > a_T + tau / a_T) -> 1 - exp(-2 * Lambda * exp(-tau)),
//! a_T = sqrt(2 ln(T / sqrt(ln T)))
//! ```
//!
//! with `Lambda = 0.274`. Solving the right-hand side for `tau` at level
//! `alpha` gives the analytic threshold. The Monte-Carlo quantile of the same
//! norm is available for small `T` and for checking the approximation.
//! Signs with an atom at zero give a stochastically smaller norm, so the
//! Rademacher threshold stays valid for discrete data.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RnspError};
use crate::model::DetectionConfig;
use crate::norm::norm_all_raw;
use crate::rng::{derive_seed, stream_rng};

pub const DEFAULT_LAMBDA_CONSTANT: f64 = 0.274;

/// Replicates used when the engine falls back to simulation (`T < 3`).
pub const FALLBACK_MC_REPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    Analytic,
    MonteCarlo,
    Override,
}

impl std::fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::MonteCarlo => "monte_carlo",
            Self::Override => "override",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub lambda_constant: f64,
    pub value: f64,
    pub method: ThresholdMethod,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RnspError::Domain(format!(
            "alpha must lie in (0,1); got {alpha}"
        )))
    }
}

/// Solves `1 - exp(-2 Lambda exp(-tau)) = alpha` for `tau`.
pub fn tau_from_alpha(alpha: f64, lambda_constant: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda_constant > 0.0 && lambda_constant.is_finite()) {
        return Err(RnspError::Domain(format!(
            "lambda constant must be positive; got {lambda_constant}"
        )));
    }
    let hazard = (1.0 / (1.0 - alpha)).ln();
    Ok(-(hazard / (2.0 * lambda_constant)).ln())
}

/// Limiting exceedance probability at `tau`.
pub fn exceedance_probability(tau: f64, lambda_constant: f64) -> f64 {
    1.0 - (-2.0 * lambda_constant * (-tau).exp()).exp()
}

/// `a_T = sqrt(2 ln(T / sqrt(ln T)))`, natural logarithms.
pub fn scale_a(t: usize) -> Result<f64> {
    if t < 3 {
        return Err(RnspError::TooShortForAsymptotic { t });
    }
    let t = t as f64;
    Ok((2.0 * (t / t.ln().sqrt()).ln()).sqrt())
}

pub fn lambda_alpha(t: usize, alpha: f64, lambda_constant: f64) -> Result<ThresholdSpec> {
    let a = scale_a(t)?;
    let tau = tau_from_alpha(alpha, lambda_constant)?;
    Ok(ThresholdSpec {
        t,
        alpha,
        lambda_constant,
        value: a + tau / a,
        method: ThresholdMethod::Analytic,
    })
}

/// Sup-norms of `n_reps` independent sign vectors of length `t` with
/// `P(0) = zero_prob` and `P(+1) = P(-1) = (1 - zero_prob) / 2`. Replicate
/// `i` draws from stream `i` of `seed`.
pub fn simulate_null_norms(t: usize, n_reps: usize, seed: u64, zero_prob: f64) -> Vec<f64> {
    (0..n_reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let x: Vec<i8> = (0..t)
                .map(|_| {
                    if zero_prob > 0.0 && rng.random_bool(zero_prob) {
                        0
                    } else if rng.random_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            norm_all_raw(&x)
        })
        .collect()
}

/// Smallest sample value with at least a `level` fraction of the sample at or
/// below it.
pub fn upper_quantile(sample: &[f64], level: f64) -> f64 {
    assert!(!sample.is_empty());
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = ((level * n as f64) - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

fn check_mc(t: usize, n_reps: usize, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if t == 0 {
        return Err(RnspError::Domain("T must be >= 1".into()));
    }
    if n_reps < 100 {
        return Err(RnspError::Domain(format!(
            "Monte-Carlo thresholds need at least 100 replicates; got {n_reps}"
        )));
    }
    Ok(())
}

/// Empirical `(1 - alpha)`-quantile of the Rademacher sup-norm.
pub fn mc_norm_quantile(t: usize, alpha: f64, n_reps: usize, seed: u64) -> Result<ThresholdSpec> {
    mc_norm_quantile_with_zeros(t, alpha, n_reps, seed, 0.0)
}

pub fn mc_norm_quantile_with_zeros(
    t: usize,
    alpha: f64,
    n_reps: usize,
    seed: u64,
    zero_prob: f64,
) -> Result<ThresholdSpec> {
    check_mc(t, n_reps, alpha)?;
    if !(0.0..1.0).contains(&zero_prob) {
        return Err(RnspError::Domain(format!(
            "zero probability must lie in [0,1); got {zero_prob}"
        )));
    }
    let norms = simulate_null_norms(t, n_reps, seed, zero_prob);
    Ok(ThresholdSpec {
        t,
        alpha,
        lambda_constant: DEFAULT_LAMBDA_CONSTANT,
        value: upper_quantile(&norms, 1.0 - alpha),
        method: ThresholdMethod::MonteCarlo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub mc_quantile: f64,
    pub tau_hat: f64,
    pub lambda_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub estimate: f64,
    pub n_reps: usize,
    pub cells: Vec<CalibrationCell>,
}

/// Inverts the limiting law at one `(T, alpha)` given an observed quantile.
pub fn lambda_from_quantile(t: usize, alpha: f64, quantile: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let a = scale_a(t)?;
    let tau_hat = a * (quantile - a);
    let lambda_hat = (1.0 / (1.0 - alpha)).ln() / (2.0 * (-tau_hat).exp());
    Ok((tau_hat, lambda_hat))
}

/// Estimates `Lambda` by matching Monte-Carlo quantiles on a `(T, alpha)` grid
/// and averaging the per-cell estimates. One set of replicates per `T` is
/// shared across the `alpha` grid.
pub fn calibrate_lambda_constant(
    t_grid: &[usize],
    alpha_grid: &[f64],
    n_reps: usize,
    seed: u64,
) -> Result<Calibration> {
    if t_grid.is_empty() || alpha_grid.is_empty() {
        return Err(RnspError::EmptyGrid);
    }
    for &alpha in alpha_grid {
        check_alpha(alpha)?;
    }
    let mut cells = Vec::with_capacity(t_grid.len() * alpha_grid.len());
    for &t in t_grid {
        scale_a(t)?;
        check_mc(t, n_reps, alpha_grid[0])?;
        let norms = simulate_null_norms(t, n_reps, derive_seed(seed, t as u64), 0.0);
        for &alpha in alpha_grid {
            let q = upper_quantile(&norms, 1.0 - alpha);
            let (tau_hat, lambda_hat) = lambda_from_quantile(t, alpha, q)?;
            cells.push(CalibrationCell {
                t,
                alpha,
                mc_quantile: q,
                tau_hat,
                lambda_hat,
            });
        }
    }
    let estimate = cells.iter().map(|c| c.lambda_hat).sum::<f64>() / cells.len() as f64;
    Ok(Calibration {
        estimate,
        n_reps,
        cells,
    })
}

/// Threshold used by a detection run on a series of length `t`: an explicit
/// override, else the analytic value, else (for `T < 3`) simulation.
pub fn resolve_threshold(t: usize, config: &DetectionConfig) -> Result<ThresholdSpec> {
    if let Some(value) = config.threshold_override {
        return Ok(ThresholdSpec {
            t,
            alpha: config.alpha,
            lambda_constant: DEFAULT_LAMBDA_CONSTANT,
            value,
            method: ThresholdMethod::Override,
        });
    }
    if t >= 3 {
        lambda_alpha(t, config.alpha, DEFAULT_LAMBDA_CONSTANT)
    } else {
        mc_norm_quantile(
            t,
            config.alpha,
            FALLBACK_MC_REPS,
            derive_seed(config.seed, u64::MAX),
        )
    }
}
