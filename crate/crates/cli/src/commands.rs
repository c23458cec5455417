// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rnsp_core::threshold::{calibrate_lambda_constant, DEFAULT_LAMBDA_CONSTANT};
use rnsp_core::{
    detect, lambda_alpha, mc_norm_quantile, run_experiment, DetectionConfig, ExperimentRow, Model,
    Overlap, Sampling,
};

use crate::error::CliError;
use crate::input::{parse_series, CsvOptions};
use crate::report::{plot_data, summary_table, ReportDocument};

/// Calibration runs below this many replicates get a warning.
const WIDE_DIAGNOSTICS_REPS: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "rnsp",
    version,
    about = "Robust detection of intervals of significance in univariate series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run detection on a series and write a JSON report.
    Detect(DetectArgs),
    /// Print the significance threshold for a series length.
    Threshold(ThresholdArgs),
    /// Run a simulation experiment and print aggregated rows.
    Simulate(SimulateArgs),
    /// Estimate the threshold constant by simulation.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SamplingArg {
    Random,
    Grid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OverlapArg {
    None,
    Midpoint,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Minimum number of sub-intervals drawn per recursive call.
    #[arg(long = "M", default_value_t = 1000)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    pub sampling: SamplingArg,
    #[arg(long, value_enum, default_value = "none")]
    pub overlap: OverlapArg,
    /// Zero out deviations of intervals with e - s above this.
    #[arg(long = "max-len")]
    pub max_len: Option<usize>,
}

impl EngineArgs {
    fn config(&self, threshold: Option<f64>) -> DetectionConfig {
        DetectionConfig {
            alpha: self.alpha,
            m: self.m,
            sampling: match self.sampling {
                SamplingArg::Random => Sampling::Random,
                SamplingArg::Grid => Sampling::Grid,
            },
            overlap: match self.overlap {
                OverlapArg::None => Overlap::None,
                OverlapArg::Midpoint => Overlap::Midpoint,
            },
            max_len: self.max_len,
            seed: self.seed,
            threshold_override: threshold,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// CSV or plain-text file; `-` reads standard input.
    pub input: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Use this threshold instead of the one implied by alpha.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// 1-based column holding the series.
    #[arg(long)]
    pub column: Option<usize>,
    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print a summary table to standard error.
    #[arg(long)]
    pub summary: bool,
    /// Write a `t,y,in_region` CSV for plotting.
    #[arg(long = "plot-data")]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long = "T")]
    pub t: usize,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Also estimate the threshold from this many null replicates.
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "lambda-constant", default_value_t = DEFAULT_LAMBDA_CONSTANT)]
    pub lambda_constant: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model name, a comma-separated list, `null` or `all`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long = "T-grid", default_value = "200,500,1000")]
    pub t_grid: String,
    #[arg(long = "alpha-grid", default_value = "0.05,0.1")]
    pub alpha_grid: String,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextFormat,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect(a) => cmd_detect(&a),
        Command::Threshold(a) => emit(None, &cmd_threshold(&a)?),
        Command::Simulate(a) => emit(a.output.as_deref(), &cmd_simulate(&a)?),
        Command::Calibrate(a) => emit(None, &cmd_calibrate(&a)?),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(&p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| CliError::io("standard input", e))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| CliError::io(&path.display().to_string(), e))
    }
}

pub fn cmd_detect(a: &DetectArgs) -> Result<(), CliError> {
    let config = a.engine.config(a.threshold);
    config.validate()?;
    if a.column == Some(0) {
        return Err(CliError::Validation("--column is 1-based".into()));
    }
    let bytes = read_input(&a.input)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Parse(format!("{}: not UTF-8: {e}", a.input.display())))?;
    let series = parse_series(
        text,
        CsvOptions {
            column: a.column,
            header: a.header,
        },
    )?;
    let report = detect(&series, &config)?;
    let doc = ReportDocument::new(&report, &bytes);
    if a.summary {
        eprint!("{}", summary_table(&doc));
    }
    if let Some(p) = &a.plot_data {
        emit(Some(p), &plot_data(&series, &doc))?;
    }
    emit(a.output.as_deref(), &doc.to_json())
}

pub fn cmd_threshold(a: &ThresholdArgs) -> Result<String, CliError> {
    if a.t == 0 {
        return Err(CliError::Validation("T must be >= 1".into()));
    }
    let analytic = if a.t >= 3 {
        Some(lambda_alpha(a.t, a.alpha, a.lambda_constant)?)
    } else if a.mc.is_none() {
        return Err(CliError::Validation(format!(
            "the analytic threshold needs T >= 3; got {} (use --mc REPS)",
            a.t
        )));
    } else {
        None
    };
    let mc =
        a.mc.map(|reps| mc_norm_quantile(a.t, a.alpha, reps, a.seed))
            .transpose()?;
    let specs: Vec<_> = analytic.into_iter().chain(mc).collect();
    match a.format {
        TextFormat::Json => Ok(to_json(&specs)),
        TextFormat::Text => {
            let mut out = String::new();
            for s in &specs {
                let _ = writeln!(out, "{:<12} {:.6}", s.method.to_string(), s.value);
            }
            Ok(out)
        }
    }
}

fn parse_models(spec: &str) -> Result<Vec<Model>, CliError> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "all" => Ok(Model::ALL.to_vec()),
        "null" => Ok(Model::NULL.to_vec()),
        _ => spec
            .split(',')
            .map(|m| m.trim().parse::<Model>().map_err(CliError::from))
            .collect(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn experiment_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(
        "model,n_paths,coverage_count,zero_detection_count,mean_prop_genuine,mean_n_genuine,mean_n_regions,mean_avg_genuine_len\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.model,
            r.n_paths,
            r.coverage_count,
            r.zero_detection_count,
            opt(r.mean_prop_genuine),
            r.mean_n_genuine,
            r.mean_n_regions,
            opt(r.mean_avg_genuine_len)
        );
    }
    out
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let models = parse_models(&a.model)?;
    let config = a.engine.config(None);
    let rows = models
        .into_iter()
        .map(|m| run_experiment(m, a.paths, &config, a.engine.seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match a.format {
        Format::Csv => experiment_csv(&rows),
        Format::Json => to_json(&rows),
    })
}

fn parse_grid<T: std::str::FromStr>(flag: &str, text: &str) -> Result<Vec<T>, CliError> {
    let grid = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Validation(format!("{flag}: cannot parse '{s}'")))
        })
        .collect::<Result<Vec<T>, _>>()?;
    if grid.is_empty() {
        return Err(CliError::Validation(format!("{flag} must not be empty")));
    }
    Ok(grid)
}

pub fn cmd_calibrate(a: &CalibrateArgs) -> Result<String, CliError> {
    let t_grid: Vec<usize> = parse_grid("--T-grid", &a.t_grid)?;
    let alpha_grid: Vec<f64> = parse_grid("--alpha-grid", &a.alpha_grid)?;
    if a.reps < WIDE_DIAGNOSTICS_REPS {
        eprintln!(
            "warning: {} replicates per T; quantile estimates and the per-cell diagnostics will be wide",
            a.reps
        );
    }
    let cal = calibrate_lambda_constant(&t_grid, &alpha_grid, a.reps, a.seed)?;
    match a.format {
        TextFormat::Json => Ok(to_json(&cal)),
        TextFormat::Text => {
            let mut out = format!(
                "Lambda estimate {:.4} ({} replicates per T)\n",
                cal.estimate, cal.n_reps
            );
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>10} {:>9} {:>9}",
                "T", "alpha", "quantile", "tau", "Lambda"
            );
            for c in &cal.cells {
                let _ = writeln!(
                    out,
                    "{:>6} {:>6} {:>10.4} {:>9.4} {:>9.4}",
                    c.t, c.alpha, c.mc_quantile, c.tau_hat, c.lambda_hat
                );
            }
            Ok(out)
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serialisable");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid::<usize>("--T-grid", "200, 500,1000").unwrap(),
            [200, 500, 1000]
        );
        assert_eq!(
            parse_grid::<usize>("--T-grid", "").unwrap_err().exit_code(),
            3
        );
        assert_eq!(
            parse_grid::<f64>("--alpha-grid", "0.1,x")
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn model_lists() {
        assert_eq!(parse_models("all").unwrap().len(), Model::ALL.len());
        assert_eq!(
            parse_models("PlainGauss, Blocks").unwrap(),
            [Model::PlainGauss, Model::Blocks]
        );
        assert_eq!(parse_models("Nope").unwrap_err().exit_code(), 3);
    }
}
