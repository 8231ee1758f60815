//! `pdeid montecarlo`: identification accuracy over noisy replicates.

use std::path::PathBuf;

use clap::Args;
use pdeid::dictionary::build_dictionary;
use pdeid::lasso::{coordinate_descent, solution_path, LassoConfig};
use pdeid::simulate::{add_noise, NoiseSpec, PdeSpec};
use pdeid::spline::{default_alpha, estimate_derivatives};
use pdeid::terms::{enumerate_terms, TermLabel};
use pdeid::{Field, Grid1D};

use super::identify::pipeline_options;
use super::simulate::parse_pde_kind;
use super::{parse_support, PipelineOptions};
use crate::config::{parse_list, resolve, ConfigMap};
use crate::{derive_seed, CliError, CliResult};

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// PDE to study: transport | inviscid | viscous.
    #[arg(long)]
    pub pde: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated noise levels.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Replicates per noise level.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
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
    /// Score at a single penalty instead of the path criterion.
    #[arg(long)]
    pub single_lambda: Option<f64>,
    /// Override the true support used for scoring.
    #[arg(long)]
    pub true_support: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub wavenumber: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value = "pdeid_out")]
    pub output_dir: PathBuf,
}

/// Resolved study description.
#[derive(Debug, Clone)]
pub struct StudyParams {
    pub spec: PdeSpec,
    pub pde_name: String,
    pub m: usize,
    pub n: usize,
    pub sigmas: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub opts: PipelineOptions,
    pub truth: Vec<TermLabel>,
}

#[derive(Debug, Clone)]
pub struct SigmaOutcome {
    pub sigma: f64,
    pub successes: usize,
    pub replicates: usize,
}

impl SigmaOutcome {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.replicates as f64
    }
}

impl StudyParams {
    pub fn resolve(args: &MontecarloArgs) -> CliResult<Self> {
        let cfg = match &args.config {
            Some(path) => ConfigMap::load(path)?,
            None => ConfigMap::empty(),
        };
        let pde_name = resolve(args.pde.clone(), &cfg, "pde", "transport".to_string())?;
        let kind = parse_pde_kind(
            &pde_name,
            resolve(args.a, &cfg, "a", -2.0)?,
            resolve(args.amplitude, &cfg, "amplitude", 2.0)?,
            resolve(args.wavenumber, &cfg, "wavenumber", 4.0)?,
            resolve(args.nu, &cfg, "nu", 0.1)?,
        )?;
        let x_max = resolve(args.x_max, &cfg, "x_max", 1.0)?;
        let t_max = resolve(args.t_max, &cfg, "t_max", 0.1)?;
        let spec = PdeSpec::new(kind, x_max, t_max)?;
        let truth = match &args.true_support {
            Some(raw) => parse_support(raw)?,
            None => spec.true_support(),
        };
        let sigma_raw = match &args.sigma {
            Some(s) => s.clone(),
            None => cfg.raw("sigma").unwrap_or("0.01,0.1,1").to_string(),
        };
        Ok(Self {
            spec,
            pde_name,
            m: resolve(args.m, &cfg, "m", 100)?,
            n: resolve(args.n, &cfg, "n", 100)?,
            sigmas: parse_list(&sigma_raw, "sigma")?,
            replicates: resolve(args.replicates, &cfg, "replicates", 50)?,
            seed: resolve(args.seed, &cfg, "seed", 0)?,
            opts: pipeline_options(
                &cfg,
                args.alpha_x,
                args.alpha_t,
                args.p_max,
                args.q_max,
                args.n_lambdas,
                args.lambda_ratio,
                args.single_lambda,
            )?,
            truth,
        })
    }
}

/// One replicate: noise, estimate, dictionary, path, support check.
fn replicate_succeeds(
    clean: &Field,
    sigma: f64,
    seed: u64,
    opts: &PipelineOptions,
    truth_idx: &[usize],
) -> CliResult<bool> {
    let noisy = add_noise(clean, &NoiseSpec::new(sigma, seed)?);
    let grid = noisy.grid();
    let ax = opts.alpha_x.unwrap_or_else(|| default_alpha(grid.m()));
    let at = opts.alpha_t.unwrap_or_else(|| default_alpha(grid.n()));
    let est = estimate_derivatives(&noisy, ax, at)?;
    let dict = build_dictionary(&est, opts.p_max, opts.q_max)?;
    match opts.single_lambda {
        Some(lambda) => {
            let model = coordinate_descent(&dict, &LassoConfig::new(lambda))?;
            Ok(model.support == truth_idx)
        }
        None => {
            let path = solution_path(&dict, opts.n_lambdas, opts.lambda_ratio)?;
            Ok(path.iter().any(|m| m.support == truth_idx))
        }
    }
}

/// A replicate counts as a success when some path penalty selects
/// exactly the declared support (or, under `single_lambda`, when the
/// solve at that penalty does).
pub fn run_study(params: &StudyParams) -> CliResult<Vec<SigmaOutcome>> {
    let grid = Grid1D::uniform(params.m, params.n, params.spec.x_max, params.spec.t_max)?;
    let clean = params.spec.generate(&grid)?;

    // Resolve truth labels against the enumerated dictionary order.
    let labels = enumerate_terms(params.opts.p_max, params.opts.q_max)?;
    let mut truth_idx = Vec::new();
    for label in &params.truth {
        match labels.iter().position(|l| l == label) {
            Some(j) => truth_idx.push(j),
            None => {
                return Err(CliError::usage(format!(
                    "true-support term '{label}' is outside the dictionary"
                )))
            }
        }
    }
    truth_idx.sort_unstable();

    let mut outcomes = Vec::with_capacity(params.sigmas.len());
    for (si, &sigma) in params.sigmas.iter().enumerate() {
        let flags: Vec<CliResult<bool>> = run_replicates(params.replicates, |r| {
            let seed = derive_seed(params.seed, (si * params.replicates + r) as u64);
            replicate_succeeds(&clean, sigma, seed, &params.opts, &truth_idx)
        });
        let mut successes = 0;
        for flag in flags {
            if flag? {
                successes += 1;
            }
        }
        outcomes.push(SigmaOutcome { sigma, successes, replicates: params.replicates });
    }
    Ok(outcomes)
}

#[cfg(feature = "parallel")]
fn run_replicates<F>(count: usize, f: F) -> Vec<CliResult<bool>>
where
    F: Fn(usize) -> CliResult<bool> + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_replicates<F>(count: usize, f: F) -> Vec<CliResult<bool>>
where
    F: Fn(usize) -> CliResult<bool> + Sync + Send,
{
    (0..count).map(f).collect()
}

pub fn run(args: &MontecarloArgs) -> CliResult<()> {
    let params = StudyParams::resolve(args)?;
    let outcomes = run_study(&params)?;

    std::fs::create_dir_all(&args.output_dir)?;
    let mut csv = String::from("sigma,replicates,successes,success_fraction\n");
    for o in &outcomes {
        csv.push_str(&format!("{},{},{},{}\n", o.sigma, o.replicates, o.successes, o.fraction()));
    }
    std::fs::write(args.output_dir.join("montecarlo.csv"), csv)?;

    let mut manifest = ConfigMap::empty();
    manifest.set("command", "montecarlo");
    manifest.set("pde", &params.pde_name);
    manifest.set("m", params.m);
    manifest.set("n", params.n);
    let sig: Vec<String> = params.sigmas.iter().map(|s| s.to_string()).collect();
    manifest.set("sigma", sig.join(","));
    manifest.set("replicates", params.replicates);
    manifest.set("seed", params.seed);
    let truth: Vec<String> = params.truth.iter().map(|l| l.to_string()).collect();
    manifest.set("true_support", truth.join(","));
    std::fs::write(args.output_dir.join("manifest.txt"), manifest.render())?;

    for o in &outcomes {
        println!(
            "montecarlo: {} sigma={} -> {}/{} = {:.3}",
            params.pde_name,
            o.sigma,
            o.successes,
            o.replicates,
            o.fraction()
        );
    }
    Ok(())
}
