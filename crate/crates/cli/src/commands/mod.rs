//! Subcommand implementations and the shared identification pipeline.

pub mod benchmark;
pub mod diagnose;
pub mod forecast;
pub mod identify;
pub mod montecarlo;
pub mod simulate;

use pdeid::conditions::{diagnose_conditions, ConditionReport};
use pdeid::dictionary::{build_dictionary, Dictionary};
use pdeid::lasso::{coordinate_descent, refit_ols, solution_path, IdentifiedModel, LassoConfig};
use pdeid::spline::{default_alpha, estimate_derivatives};
use pdeid::terms::TermLabel;
use pdeid::Field;

use crate::report::{CoefficientEntry, ModelReport, RefitEntry};
use crate::{CliError, CliResult};

/// Resolved stage-one / stage-two settings shared by the pipeline
/// commands.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub alpha_x: Option<f64>,
    pub alpha_t: Option<f64>,
    pub p_max: usize,
    pub q_max: usize,
    pub n_lambdas: usize,
    pub lambda_ratio: f64,
    /// Solve only at this penalty instead of walking the path.
    pub single_lambda: Option<f64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            alpha_x: None,
            alpha_t: None,
            p_max: 2,
            q_max: 2,
            n_lambdas: 100,
            lambda_ratio: 1e-4,
            single_lambda: None,
        }
    }
}

/// Everything a pipeline run produces before reports are written.
pub struct PipelineOutcome {
    pub dict: Dictionary,
    pub path: Vec<IdentifiedModel>,
    pub chosen_index: usize,
    pub conditions: Option<ConditionReport>,
}

impl PipelineOutcome {
    pub fn chosen(&self) -> &IdentifiedModel {
        &self.path[self.chosen_index]
    }
}

/// Estimate derivatives, assemble the dictionary, walk the solution
/// path (or solve a single penalty), pick a model, refit it and run
/// the support diagnostics.
pub fn identify_field(field: &Field, opts: &PipelineOptions) -> CliResult<PipelineOutcome> {
    let grid = field.grid();
    let ax = opts.alpha_x.unwrap_or_else(|| default_alpha(grid.m()));
    let at = opts.alpha_t.unwrap_or_else(|| default_alpha(grid.n()));
    let est = estimate_derivatives(field, ax, at)?;
    let dict = build_dictionary(&est, opts.p_max, opts.q_max)?;

    let path = match opts.single_lambda {
        Some(lambda) => vec![coordinate_descent(&dict, &LassoConfig::new(lambda))?],
        None => solution_path(&dict, opts.n_lambdas, opts.lambda_ratio)?,
    };
    let chosen_index = choose_model(&path);

    let mut outcome = PipelineOutcome { dict, path, chosen_index, conditions: None };
    let support = outcome.chosen().support.clone();
    if !support.is_empty() {
        if let Ok(refit) = refit_ols(&outcome.dict, &support) {
            outcome.path[chosen_index].refit_beta = Some(refit);
        }
        if support.len() < outcome.dict.k() {
            outcome.conditions = Some(diagnose_conditions(&outcome.dict, &support)?);
        }
    }
    Ok(outcome)
}

/// Model-selection rule for reading an identification off a solution
/// path: the nonempty support that persists over the longest
/// contiguous stretch of penalties wins; ties go to the stretch at
/// larger penalties. Falls back to the last path point when every
/// support is empty.
pub fn choose_model(path: &[IdentifiedModel]) -> usize {
    let mut best: Option<(usize, usize)> = None; // (run length, start)
    let mut start = 0;
    while start < path.len() {
        let mut end = start + 1;
        while end < path.len() && path[end].support == path[start].support {
            end += 1;
        }
        if !path[start].support.is_empty() {
            let run = end - start;
            if best.map(|(len, _)| run > len).unwrap_or(true) {
                best = Some((run, start));
            }
        }
        start = end;
    }
    best.map(|(_, s)| s).unwrap_or(path.len() - 1)
}

/// Advisory theoretical penalty floor with unit constant and r = 0.1.
pub fn lambda_theory(k: usize, n: usize) -> f64 {
    let n = n as f64;
    (k as f64).sqrt() * n.ln() / n.powf(3.0 / 7.0 - 0.1)
}

/// Parse a comma-separated support declaration like `u_x,u_xx`.
pub fn parse_support(raw: &str) -> CliResult<Vec<TermLabel>> {
    let mut labels = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        labels.push(part.parse::<TermLabel>().map_err(CliError::from)?);
    }
    if labels.is_empty() {
        return Err(CliError::usage("empty support declaration"));
    }
    Ok(labels)
}

/// Map declared support labels to dictionary indices.
pub fn support_indices(dict: &Dictionary, labels: &[TermLabel]) -> CliResult<Vec<usize>> {
    let mut idx = Vec::with_capacity(labels.len());
    for label in labels {
        match dict.label_index(label) {
            Some(j) => idx.push(j),
            None => {
                return Err(CliError::usage(format!(
                    "term '{label}' is not in the dictionary (p_max/q_max too small?)"
                )))
            }
        }
    }
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// Assemble the model report for the chosen path point.
pub fn model_report(
    outcome: &PipelineOutcome,
    selection_rule: &str,
    true_support: Option<&[usize]>,
    n_time: usize,
) -> ModelReport {
    let dict = &outcome.dict;
    let model = outcome.chosen();
    let coefficients = dict
        .labels()
        .iter()
        .enumerate()
        .map(|(j, label)| CoefficientEntry {
            label: label.to_string(),
            beta_scaled: model.beta_scaled[j],
            beta_raw: model.beta_raw[j],
        })
        .collect();
    let refit = model.refit_beta.as_ref().map(|r| {
        model
            .support
            .iter()
            .zip(r)
            .map(|(&j, &c)| RefitEntry { label: dict.labels()[j].to_string(), coefficient: c })
            .collect()
    });
    let (true_labels, recovered, recovered_lambdas) = match true_support {
        None => (None, None, None),
        Some(truth) => {
            let mut sorted = truth.to_vec();
            sorted.sort_unstable();
            let lambdas: Vec<f64> = outcome
                .path
                .iter()
                .filter(|m| m.support == sorted)
                .map(|m| m.lambda)
                .collect();
            let labels = sorted.iter().map(|&j| dict.labels()[j].to_string()).collect();
            (Some(labels), Some(!lambdas.is_empty()), Some(lambdas))
        }
    };
    ModelReport {
        lambda: model.lambda,
        selection_rule: selection_rule.to_string(),
        converged: model.converged,
        sweeps: model.sweeps,
        kkt_residual: model.kkt_residual,
        objective: model.objective,
        support: model.support_labels(dict),
        coefficients,
        refit,
        lambda_theory_advisory: lambda_theory(dict.k(), n_time),
        true_support: true_labels,
        true_support_recovered: recovered,
        recovered_lambdas,
    }
}

/// Write the solution path as CSV: one row per penalty, de-scaled
/// coefficients per label.
pub fn write_path_csv(
    path: &std::path::Path,
    dict: &Dictionary,
    models: &[IdentifiedModel],
) -> CliResult<()> {
    let mut out = String::new();
    let mut header = vec!["lambda".to_string()];
    header.extend(dict.labels().iter().map(|l| l.to_string()));
    out.push_str(&header.join(","));
    out.push('\n');
    for model in models {
        let mut cells = vec![format!("{}", model.lambda)];
        cells.extend(model.beta_raw.iter().map(|b| format!("{b}")));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Conditions report payload for a support expressed as labels.
pub fn conditions_report(
    dict: &Dictionary,
    support: &[usize],
    report: &ConditionReport,
) -> crate::report::ConditionsReport {
    crate::report::ConditionsReport {
        support: support.iter().map(|&j| dict.labels()[j].to_string()).collect(),
        invertible: report.invertible,
        incoherence: report.incoherence,
        min_eigenvalue: report.min_eigenvalue,
    }
}

/// Ordinary least-squares log-log slope, `None` below two points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(num / den)
}
