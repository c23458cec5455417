// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulation models and coverage metrics.
//!
//! Null models have a constant median; non-null models come with their true
//! change-point locations `eta` (last index before each change). A returned
//! interval is genuine when it contains some pair `[eta, eta + 1]`, and a run
//! is covered when every returned interval is genuine.
//!
//! Path `i` of an experiment with seed `seed` uses `p = derive_seed(seed, i)`;
//! the sample path is drawn from stream 0 of `p` and the detection run is
//! seeded with `derive_seed(p, 1)`.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::detect;
use crate::error::{Result, RnspError};
use crate::model::{DetectionConfig, Interval, Series};
use crate::rng::{derive_seed, stream_rng};

const BLOCKS_FIXTURE: &str = include_str!("../data/blocks.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    PlainGauss,
    PlainPoisson,
    HeterogeneousGauss,
    SymmetricBernoulli,
    PlainCauchy,
    Mix1,
    Mix2,
    Blocks,
    Cauchy3,
    Bursts,
    PoissonCP,
}

impl Model {
    pub const ALL: [Model; 11] = [
        Model::PlainGauss,
        Model::PlainPoisson,
        Model::HeterogeneousGauss,
        Model::SymmetricBernoulli,
        Model::PlainCauchy,
        Model::Mix1,
        Model::Mix2,
        Model::Blocks,
        Model::Cauchy3,
        Model::Bursts,
        Model::PoissonCP,
    ];

    pub const NULL: [Model; 7] = [
        Model::PlainGauss,
        Model::PlainPoisson,
        Model::HeterogeneousGauss,
        Model::SymmetricBernoulli,
        Model::PlainCauchy,
        Model::Mix1,
        Model::Mix2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::PlainGauss => "PlainGauss",
            Model::PlainPoisson => "PlainPoisson",
            Model::HeterogeneousGauss => "HeterogeneousGauss",
            Model::SymmetricBernoulli => "SymmetricBernoulli",
            Model::PlainCauchy => "PlainCauchy",
            Model::Mix1 => "Mix1",
            Model::Mix2 => "Mix2",
            Model::Blocks => "Blocks",
            Model::Cauchy3 => "Cauchy3",
            Model::Bursts => "Bursts",
            Model::PoissonCP => "PoissonCP",
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            Model::PlainGauss | Model::PlainCauchy => 100,
            Model::PlainPoisson | Model::SymmetricBernoulli | Model::Mix2 => 200,
            Model::HeterogeneousGauss => 250,
            Model::Mix1 | Model::Cauchy3 => 300,
            Model::Blocks => 2048,
            Model::Bursts => 800,
            Model::PoissonCP => 350,
        }
    }

    pub fn true_change_points(self) -> Vec<usize> {
        match self {
            Model::Cauchy3 => vec![100, 200],
            Model::Bursts => vec![200, 280, 480, 560, 760],
            Model::PoissonCP => vec![50, 100, 150],
            Model::Blocks => blocks_segments()
                .iter()
                .rev()
                .skip(1)
                .rev()
                .map(|seg| seg.1)
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_null(self) -> bool {
        self.true_change_points().is_empty()
    }

    /// One sample path and its true change-points.
    pub fn generate<R: Rng + ?Sized>(self, rng: &mut R) -> (Series, Vec<usize>) {
        let values: Vec<f64> = match self {
            Model::PlainGauss => normals(rng, 100),
            Model::PlainPoisson => (0..200).map(|_| poisson(rng, 1.0)).collect(),
            Model::HeterogeneousGauss => repeat_levels(&[(1.0, 100), (8.0, 50), (1.0, 100)])
                .map(|sd| sd * normal(rng))
                .collect(),
            Model::SymmetricBernoulli => (0..200)
                .map(|_| f64::from(u8::from(rng.random_bool(0.5))))
                .collect(),
            Model::PlainCauchy => (0..100).map(|_| cauchy(rng, 0.0)).collect(),
            Model::Mix1 => {
                let labels: Vec<u8> = (0..300)
                    .map(|_| {
                        let u: f64 = rng.random();
                        if u < 0.35 {
                            1
                        } else if u < 0.65 {
                            2
                        } else {
                            3
                        }
                    })
                    .collect();
                labels
                    .into_iter()
                    .map(|l| if l == 2 { 2.0 } else { normal(rng) })
                    .collect()
            }
            Model::Mix2 => {
                let counts: Vec<f64> = (0..200).map(|_| poisson(rng, 5.0)).collect();
                counts.into_iter().map(|c| c + normal(rng) / 30.0).collect()
            }
            Model::Blocks => blocks_signal()
                .into_iter()
                .map(|f| f + 10.0 * normal(rng))
                .collect(),
            Model::Cauchy3 => repeat_levels(&[(1.0, 100), (2.0, 100), (1.0, 100)])
                .map(|loc| cauchy(rng, loc))
                .collect(),
            Model::Bursts => repeat_levels(&[
                (1.0, 200),
                (3.0, 80),
                (1.0, 200),
                (3.0, 80),
                (1.0, 200),
                (4.0, 40),
            ])
            .map(|sd| (sd * normal(rng)).powi(2))
            .collect(),
            Model::PoissonCP => repeat_levels(&[(1.0, 50), (4.0, 50), (10.0, 50), (2.0, 200)])
                .map(|mean| poisson(rng, mean))
                .collect(),
        };
        let series = Series::new(values).expect("simulated paths are finite and long enough");
        (series, self.true_change_points())
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = RnspError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Model::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_lowercase() == key)
            .ok_or_else(|| RnspError::UnknownModel(s.to_string()))
    }
}

fn repeat_levels(levels: &[(f64, usize)]) -> impl Iterator<Item = f64> + '_ {
    levels.iter().flat_map(|&(v, n)| std::iter::repeat_n(v, n))
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn normals<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// Standard Cauchy by inversion, shifted to `location`.
fn cauchy<R: Rng + ?Sized>(rng: &mut R, location: f64) -> f64 {
    let u: f64 = rng.random();
    (PI * (u - 0.5)).tan() + location
}

/// Poisson draw by sequential inversion of the CDF; intended for small means.
fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / f64::from(k);
        cdf += p;
    }
    f64::from(k)
}

/// `(from, to, level)` rows of the blocks fixture.
pub fn blocks_segments() -> Vec<(usize, usize, f64)> {
    BLOCKS_FIXTURE
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("from"))
        .map(|l| {
            let mut parts = l.split(',');
            let mut next = || parts.next().expect("three columns").trim();
            let from = next().parse().expect("from index");
            let to = next().parse().expect("to index");
            let level = next().parse().expect("level");
            (from, to, level)
        })
        .collect()
}

pub fn blocks_signal() -> Vec<f64> {
    blocks_segments()
        .into_iter()
        .flat_map(|(from, to, level)| std::iter::repeat_n(level, to - from + 1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// No spurious region was returned.
    pub covered: bool,
    pub n_regions: usize,
    pub n_genuine: usize,
    /// `None` when no regions were returned.
    pub prop_genuine: Option<f64>,
    /// `None` when no genuine regions were returned.
    pub avg_genuine_len: Option<f64>,
}

pub fn evaluate_run(regions: &[Interval], true_cps: &[usize]) -> RunMetrics {
    let genuine: Vec<&Interval> = regions
        .iter()
        .filter(|r| true_cps.iter().any(|&eta| r.covers_change_at(eta)))
        .collect();
    let n_regions = regions.len();
    let n_genuine = genuine.len();
    RunMetrics {
        covered: n_genuine == n_regions,
        n_regions,
        n_genuine,
        prop_genuine: (n_regions > 0).then(|| n_genuine as f64 / n_regions as f64),
        avg_genuine_len: (n_genuine > 0)
            .then(|| genuine.iter().map(|r| r.len() as f64).sum::<f64>() / n_genuine as f64),
    }
}

/// One row of a simulation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub model: String,
    pub n_paths: usize,
    /// Paths without a spurious region.
    pub coverage_count: usize,
    /// Paths with no region at all.
    pub zero_detection_count: usize,
    /// Over paths returning at least one region.
    pub mean_prop_genuine: Option<f64>,
    pub mean_n_genuine: f64,
    pub mean_n_regions: f64,
    /// Over paths returning at least one genuine region.
    pub mean_avg_genuine_len: Option<f64>,
}

impl ExperimentRow {
    pub fn aggregate(model: &str, runs: &[RunMetrics]) -> Self {
        let n = runs.len();
        let mean_of =
            |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
        Self {
            model: model.to_string(),
            n_paths: n,
            coverage_count: runs.iter().filter(|r| r.covered).count(),
            zero_detection_count: runs.iter().filter(|r| r.n_regions == 0).count(),
            mean_prop_genuine: mean_of(runs.iter().filter_map(|r| r.prop_genuine).collect()),
            mean_n_genuine: runs.iter().map(|r| r.n_genuine as f64).sum::<f64>() / n as f64,
            mean_n_regions: runs.iter().map(|r| r.n_regions as f64).sum::<f64>() / n as f64,
            mean_avg_genuine_len: mean_of(runs.iter().filter_map(|r| r.avg_genuine_len).collect()),
        }
    }
}

/// Metrics of path `index` of an experiment.
pub fn run_path(
    model: Model,
    config: &DetectionConfig,
    seed: u64,
    index: usize,
) -> Result<RunMetrics> {
    let path_seed = derive_seed(seed, index as u64);
    let (series, cps) = model.generate(&mut stream_rng(path_seed, 0));
    let cfg = DetectionConfig {
        seed: derive_seed(path_seed, 1),
        ..config.clone()
    };
    let report = detect(&series, &cfg)?;
    Ok(evaluate_run(&report.intervals(), &cps))
}

pub fn run_experiment(
    model: Model,
    n_paths: usize,
    config: &DetectionConfig,
    seed: u64,
) -> Result<ExperimentRow> {
    if n_paths == 0 {
        return Err(RnspError::config("n_paths must be >= 1"));
    }
    config.validate()?;
    let runs = (0..n_paths)
        .into_par_iter()
        .map(|i| run_path(model, config, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentRow::aggregate(model.name(), &runs))
}
