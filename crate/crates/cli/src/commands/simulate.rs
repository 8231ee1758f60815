//! `pdeid simulate`: write clean and noisy benchmark fields plus a
//! replayable manifest.

use std::path::PathBuf;

use clap::Args;
use pdeid::io::save_field_csv;
use pdeid::simulate::{add_noise, NoiseSpec, PdeKind, PdeSpec};
use pdeid::Grid1D;

use crate::config::{parse_list, resolve, ConfigMap};
use crate::{derive_seed, CliError, CliResult};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Flat key-value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// PDE to simulate: transport | inviscid | viscous.
    #[arg(long)]
    pub pde: Option<String>,
    /// Spatial resolution M.
    #[arg(long)]
    pub m: Option<usize>,
    /// Temporal resolution N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated noise levels, one noisy CSV each.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Master seed; per-sigma seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Transport wave speed.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub wavenumber: Option<f64>,
    /// Viscosity for the viscous Burgers equation.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, default_value = "pdeid_out")]
    pub output_dir: PathBuf,
}

/// Resolved simulate parameters (also the manifest schema).
#[derive(Debug, Clone)]
pub struct SimulateParams {
    pub pde: String,
    pub m: usize,
    pub n: usize,
    pub sigmas: Vec<f64>,
    pub seed: u64,
    pub x_max: f64,
    pub t_max: f64,
    pub a: f64,
    pub amplitude: f64,
    pub wavenumber: f64,
    pub nu: f64,
}

impl SimulateParams {
    pub fn resolve(args: &SimulateArgs) -> CliResult<Self> {
        let cfg = match &args.config {
            Some(path) => ConfigMap::load(path)?,
            None => ConfigMap::empty(),
        };
        let sigma_raw = match &args.sigma {
            Some(s) => s.clone(),
            None => cfg.raw("sigma").unwrap_or("0.1").to_string(),
        };
        Ok(Self {
            pde: resolve(args.pde.clone(), &cfg, "pde", "transport".to_string())?,
            m: resolve(args.m, &cfg, "m", 100)?,
            n: resolve(args.n, &cfg, "n", 100)?,
            sigmas: parse_list(&sigma_raw, "sigma")?,
            seed: resolve(args.seed, &cfg, "seed", 0)?,
            x_max: resolve(args.x_max, &cfg, "x_max", 1.0)?,
            t_max: resolve(args.t_max, &cfg, "t_max", 0.1)?,
            a: resolve(args.a, &cfg, "a", -2.0)?,
            amplitude: resolve(args.amplitude, &cfg, "amplitude", 2.0)?,
            wavenumber: resolve(args.wavenumber, &cfg, "wavenumber", 4.0)?,
            nu: resolve(args.nu, &cfg, "nu", 0.1)?,
        })
    }

    pub fn kind(&self) -> CliResult<PdeKind> {
        parse_pde_kind(&self.pde, self.a, self.amplitude, self.wavenumber, self.nu)
    }

    pub fn spec(&self) -> CliResult<PdeSpec> {
        Ok(PdeSpec::new(self.kind()?, self.x_max, self.t_max)?)
    }

    pub fn manifest(&self) -> ConfigMap {
        let mut cfg = ConfigMap::empty();
        cfg.set("command", "simulate");
        cfg.set("pde", &self.pde);
        cfg.set("m", self.m);
        cfg.set("n", self.n);
        let sig: Vec<String> = self.sigmas.iter().map(|s| s.to_string()).collect();
        cfg.set("sigma", sig.join(","));
        cfg.set("seed", self.seed);
        cfg.set("x_max", self.x_max);
        cfg.set("t_max", self.t_max);
        cfg.set("a", self.a);
        cfg.set("amplitude", self.amplitude);
        cfg.set("wavenumber", self.wavenumber);
        cfg.set("nu", self.nu);
        cfg
    }
}

pub fn parse_pde_kind(
    name: &str,
    a: f64,
    amplitude: f64,
    wavenumber: f64,
    nu: f64,
) -> CliResult<PdeKind> {
    match name.to_ascii_lowercase().as_str() {
        "transport" => Ok(PdeKind::Transport { a, amplitude, wavenumber }),
        "inviscid" | "inviscid-burgers" => Ok(PdeKind::InviscidBurgers),
        "viscous" | "viscous-burgers" => Ok(PdeKind::ViscousBurgers { nu }),
        other => Err(CliError::usage(format!(
            "unknown pde '{other}' (expected transport, inviscid or viscous)"
        ))),
    }
}

pub fn sigma_file_name(sigma: f64) -> String {
    format!("noisy_sigma{sigma}.csv")
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let params = SimulateParams::resolve(args)?;
    if params.sigmas.iter().any(|&s| s < 0.0) {
        return Err(CliError::usage("sigma values must be nonnegative"));
    }
    let spec = params.spec()?;
    let grid = Grid1D::uniform(params.m, params.n, params.x_max, params.t_max)?;
    let clean = spec.generate(&grid)?;

    std::fs::create_dir_all(&args.output_dir)?;
    save_field_csv(&clean, &args.output_dir.join("clean.csv"))?;
    for (i, &sigma) in params.sigmas.iter().enumerate() {
        let noise = NoiseSpec::new(sigma, derive_seed(params.seed, i as u64))?;
        let noisy = add_noise(&clean, &noise);
        save_field_csv(&noisy, &args.output_dir.join(sigma_file_name(sigma)))?;
    }
    std::fs::write(args.output_dir.join("manifest.txt"), params.manifest().render())?;
    println!(
        "simulate: wrote clean.csv and {} noisy field(s) to {}",
        params.sigmas.len(),
        args.output_dir.display()
    );
    Ok(())
}
