//! Serializable report payloads written by the commands.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CoefficientEntry {
    pub label: String,
    pub beta_scaled: f64,
    pub beta_raw: f64,
}

#[derive(Debug, Serialize, Clone)]
pub struct RefitEntry {
    pub label: String,
    pub coefficient: f64,
}

#[derive(Debug, Serialize)]
pub struct ModelReport {
    pub lambda: f64,
    pub selection_rule: String,
    pub converged: bool,
    pub sweeps: usize,
    pub kkt_residual: f64,
    pub objective: f64,
    pub support: Vec<String>,
    pub coefficients: Vec<CoefficientEntry>,
    /// OLS coefficients on the selected support (raw units).
    pub refit: Option<Vec<RefitEntry>>,
    /// Advisory penalty floor sqrt(K) log(N) / N^(3/7 - r) with unit
    /// constant and r = 0.1; the true constant is data dependent and
    /// unknowable, so this is reported, never enforced.
    pub lambda_theory_advisory: f64,
    pub true_support: Option<Vec<String>>,
    /// Whether some path point recovered the declared support exactly.
    pub true_support_recovered: Option<bool>,
    pub recovered_lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct ConditionsReport {
    pub support: Vec<String>,
    pub invertible: bool,
    pub incoherence: Option<f64>,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ForecastReport {
    pub terms: Vec<RefitEntry>,
    pub train_time_samples: usize,
    pub horizon_steps: usize,
    pub rmse_per_step: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SlopesReport {
    pub fixed_axis: String,
    pub fixed_value: usize,
    pub sweep: Vec<usize>,
    pub spline_slope: Option<f64>,
    pub localpoly_slope: Option<f64>,
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> crate::CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::CliError::data(format!("cannot serialize report: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
