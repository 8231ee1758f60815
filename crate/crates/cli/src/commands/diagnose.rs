//! `pdeid diagnose`: support-recovery condition diagnostics for a
//! declared support on a dataset.

use std::path::PathBuf;

use clap::Args;
use pdeid::conditions::diagnose_conditions;
use pdeid::dictionary::build_dictionary;
use pdeid::io::load_field_csv;
use pdeid::spline::{default_alpha, estimate_derivatives};

use super::{conditions_report, parse_support, support_indices};
use crate::config::{resolve, resolve_opt, ConfigMap};
use crate::report::write_json;
use crate::CliResult;

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Input field CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Support to diagnose, e.g. `u_x` or `u*u_x,u_xx`.
    #[arg(long)]
    pub support: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha_x: Option<f64>,
    #[arg(long)]
    pub alpha_t: Option<f64>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub q_max: Option<usize>,
    #[arg(long, default_value = "pdeid_out")]
    pub output_dir: PathBuf,
}

pub fn run(args: &DiagnoseArgs) -> CliResult<()> {
    let cfg = match &args.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::empty(),
    };
    let field = load_field_csv(&args.input)?;
    let grid = field.grid();
    let alpha_x = resolve_opt(args.alpha_x, &cfg, "alpha_x")?
        .unwrap_or_else(|| default_alpha(grid.m()));
    let alpha_t = resolve_opt(args.alpha_t, &cfg, "alpha_t")?
        .unwrap_or_else(|| default_alpha(grid.n()));
    let p_max = resolve(args.p_max, &cfg, "p_max", 2)?;
    let q_max = resolve(args.q_max, &cfg, "q_max", 2)?;

    let est = estimate_derivatives(&field, alpha_x, alpha_t)?;
    let dict = build_dictionary(&est, p_max, q_max)?;
    let support = support_indices(&dict, &parse_support(&args.support)?)?;
    let report = diagnose_conditions(&dict, &support)?;
    let payload = conditions_report(&dict, &support, &report);

    std::fs::create_dir_all(&args.output_dir)?;
    write_json(&args.output_dir.join("conditions.json"), &payload)?;

    match (report.incoherence, report.min_eigenvalue) {
        (Some(mu), Some(eig)) => println!(
            "diagnose: invertible = {}, incoherence = {mu:.6}, min_eigenvalue = {eig:.6e}",
            report.invertible
        ),
        _ => println!("diagnose: support Gram matrix is singular"),
    }
    Ok(())
}
