//! `pdeid forecast`: identify on training data, roll the identified
//! model forward with explicit Euler, score against observations.

use std::path::PathBuf;

use clap::Args;
use pdeid::forecast::{euler_forecast, score_forecast};
use pdeid::io::{load_field_csv, save_field_csv};
use pdeid::spline::default_alpha;
use pdeid::{Field, Grid1D};

use super::identify::pipeline_options;
use super::identify_field;
use crate::config::{resolve_opt, ConfigMap};
use crate::report::{write_json, ForecastReport, RefitEntry};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Input field CSV (training plus held-out samples).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Identify on the first this many time samples (default: all).
    /// The rollout starts from the last training slice.
    #[arg(long)]
    pub train_n: Option<usize>,
    #[arg(long)]
    pub alpha_x: Option<f64>,
    #[arg(long)]
    pub alpha_t: Option<f64>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub q_max: Option<usize>,
    #[arg(long)]
    pub n_lambdas: Option<usize>,
    #[arg(long)]
    pub lambda_ratio: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value = "pdeid_out")]
    pub output_dir: PathBuf,
}

pub fn run(args: &ForecastArgs) -> CliResult<()> {
    let cfg = match &args.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::empty(),
    };
    let opts = pipeline_options(
        &cfg,
        args.alpha_x,
        args.alpha_t,
        args.p_max,
        args.q_max,
        args.n_lambdas,
        args.lambda_ratio,
        args.lambda,
    )?;
    let field = load_field_csv(&args.input)?;
    let n_total = field.grid().n();
    let train_n = resolve_opt(args.train_n, &cfg, "train_n")?.unwrap_or(n_total);
    if train_n < 4 || train_n > n_total {
        return Err(CliError::usage(format!(
            "train_n must lie in [4, {n_total}], got {train_n}"
        )));
    }

    let train = field.truncate_time(train_n)?;
    let outcome = identify_field(&train, &opts)?;
    let model = outcome.chosen();

    // Roll from the last training slice over the remaining (or full)
    // window; the training grid's final knot anchors the horizon.
    let start = train_n - 1;
    let tail_t: Vec<f64> = field.grid().t()[start..].to_vec();
    let horizon = Grid1D::new(field.grid().x().to_vec(), tail_t)?;
    let init: Vec<f64> = (0..field.grid().m()).map(|i| field.get(i, start)).collect();
    let alpha_x = opts.alpha_x.unwrap_or_else(|| default_alpha(field.grid().m()));
    let predicted =
        euler_forecast(&init, &horizon, model, outcome.dict.labels(), alpha_x)?;

    let mut observed_vals = Vec::with_capacity(horizon.m() * horizon.n());
    for n in start..n_total {
        for i in 0..field.grid().m() {
            observed_vals.push(field.get(i, n));
        }
    }
    let observed = Field::new(horizon, observed_vals)?;
    let scored = score_forecast(&predicted, &observed)?;

    let terms: Vec<RefitEntry> = match &model.refit_beta {
        Some(refit) => model
            .support
            .iter()
            .zip(refit)
            .map(|(&j, &c)| RefitEntry {
                label: outcome.dict.labels()[j].to_string(),
                coefficient: c,
            })
            .collect(),
        None => model
            .support
            .iter()
            .map(|&j| RefitEntry {
                label: outcome.dict.labels()[j].to_string(),
                coefficient: model.beta_raw[j],
            })
            .collect(),
    };
    let report = ForecastReport {
        terms,
        train_time_samples: train_n,
        horizon_steps: scored.rmse_per_step.len(),
        rmse_per_step: scored.rmse_per_step.clone(),
    };

    std::fs::create_dir_all(&args.output_dir)?;
    save_field_csv(&scored.predicted, &args.output_dir.join("predicted.csv"))?;
    save_field_csv(&scored.residual, &args.output_dir.join("residual.csv"))?;
    write_json(&args.output_dir.join("forecast.json"), &report)?;

    let last = report.rmse_per_step.last().copied().unwrap_or(0.0);
    println!(
        "forecast: {} step(s), terminal rmse {:.6}",
        report.horizon_steps, last
    );
    Ok(())
}
