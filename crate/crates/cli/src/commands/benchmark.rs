//! `pdeid benchmark`: counted-operation complexity of the stage-one
//! estimators over a size sweep.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use pdeid::localpoly::{localpoly_fit_slice, LocalPolyConfig};
use pdeid::opcount;
use pdeid::simulate::transport_field;
use pdeid::spline::{default_alpha, estimate_derivatives};
use pdeid::Grid1D;

use super::log_log_slope;
use crate::config::{parse_list, resolve, ConfigMap};
use crate::report::{write_json, SlopesReport};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Which axis stays fixed: m | n.
    #[arg(long)]
    pub fixed: Option<String>,
    /// Value of the fixed axis.
    #[arg(long)]
    pub fixed_value: Option<usize>,
    /// Comma-separated sweep of the varying axis.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Methods to measure: both | spline | localpoly.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value = "pdeid_out")]
    pub output_dir: PathBuf,
}

/// Counted multiply-adds and wall seconds of a full spline stage-one
/// pass on transport data.
pub fn measure_spline(m: usize, n: usize) -> CliResult<(u64, f64)> {
    let grid = Grid1D::uniform(m, n, 1.0, 0.1)?;
    let field = transport_field(&grid, -2.0, 2.0, 4.0)?;
    let started = Instant::now();
    opcount::reset();
    let _ = estimate_derivatives(&field, default_alpha(m), default_alpha(n))?;
    Ok((opcount::total(), started.elapsed().as_secs_f64()))
}

/// Counted multiply-adds and wall seconds of the local-polynomial
/// baseline: derivatives to order 2 along x, order 1 along t.
pub fn measure_localpoly(m: usize, n: usize) -> CliResult<(u64, f64)> {
    let grid = Grid1D::uniform(m, n, 1.0, 0.1)?;
    let field = transport_field(&grid, -2.0, 2.0, 4.0)?;
    let cfg_x = LocalPolyConfig::new(2);
    let cfg_t = LocalPolyConfig::new(1);
    let started = Instant::now();
    opcount::reset();
    for k in 0..n {
        let _ = localpoly_fit_slice(field.time_slice(k), grid.x(), grid.x(), &cfg_x)?;
    }
    let mut series = Vec::new();
    for i in 0..m {
        field.space_series_into(i, &mut series);
        let _ = localpoly_fit_slice(&series, grid.t(), grid.t(), &cfg_t)?;
    }
    Ok((opcount::total(), started.elapsed().as_secs_f64()))
}

struct Row {
    size: usize,
    spline: Option<(u64, f64)>,
    localpoly: Option<(u64, f64)>,
}

pub fn run(args: &BenchmarkArgs) -> CliResult<()> {
    let cfg = match &args.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::empty(),
    };
    let fixed = resolve(args.fixed.clone(), &cfg, "fixed", "m".to_string())?.to_ascii_lowercase();
    if fixed != "m" && fixed != "n" {
        return Err(CliError::usage(format!("--fixed must be 'm' or 'n', got '{fixed}'")));
    }
    let fixed_value = resolve(args.fixed_value, &cfg, "fixed_value", 20)?;
    let sweep_raw = match &args.sweep {
        Some(s) => s.clone(),
        None => cfg.raw("sweep").unwrap_or("200,400,800,1000,1200,1600,2000").to_string(),
    };
    let sweep: Vec<usize> = parse_list(&sweep_raw, "sweep")?;
    let method = resolve(args.method.clone(), &cfg, "method", "both".to_string())?;
    let (do_spline, do_localpoly) = match method.as_str() {
        "both" => (true, true),
        "spline" => (true, false),
        "localpoly" => (false, true),
        other => return Err(CliError::usage(format!("unknown method '{other}'"))),
    };

    let mut rows = Vec::with_capacity(sweep.len());
    for &size in &sweep {
        let (m, n) = if fixed == "m" { (fixed_value, size) } else { (size, fixed_value) };
        let spline = if do_spline { Some(measure_spline(m, n)?) } else { None };
        let localpoly = if do_localpoly { Some(measure_localpoly(m, n)?) } else { None };
        rows.push(Row { size, spline, localpoly });
    }

    std::fs::create_dir_all(&args.output_dir)?;
    // The CSV holds only deterministic quantities; wall seconds go to
    // stdout so reruns stay byte-identical.
    let mut csv = String::from("size,spline_ops,localpoly_ops\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            row.size,
            row.spline.map(|(ops, _)| ops.to_string()).unwrap_or_default(),
            row.localpoly.map(|(ops, _)| ops.to_string()).unwrap_or_default(),
        ));
    }
    std::fs::write(args.output_dir.join("complexity.csv"), csv)?;

    let spline_points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.spline.map(|(ops, _)| (r.size as f64, ops as f64)))
        .collect();
    let localpoly_points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.localpoly.map(|(ops, _)| (r.size as f64, ops as f64)))
        .collect();
    let report = SlopesReport {
        fixed_axis: fixed.clone(),
        fixed_value,
        sweep: sweep.clone(),
        spline_slope: log_log_slope(&spline_points),
        localpoly_slope: log_log_slope(&localpoly_points),
    };
    write_json(&args.output_dir.join("slopes.json"), &report)?;

    for row in &rows {
        let fmt = |v: Option<(u64, f64)>| match v {
            Some((ops, secs)) => format!("{ops} ops in {secs:.3}s"),
            None => "-".to_string(),
        };
        println!(
            "benchmark: {}={} size={}: spline {} | localpoly {}",
            fixed,
            fixed_value,
            row.size,
            fmt(row.spline),
            fmt(row.localpoly)
        );
    }
    if let Some(s) = report.spline_slope {
        println!("benchmark: spline log-log slope {s:.4}");
    }
    if let Some(s) = report.localpoly_slope {
        println!("benchmark: localpoly log-log slope {s:.4}");
    }
    Ok(())
}
