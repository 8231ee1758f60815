//! Explicit-Euler rollout of an identified model.
//!
//! Each step re-estimates the spatial derivatives of the current state
//! with the stage-one spline, evaluates the identified terms, and
//! advances by `u + u_t * dt` across the temporal gaps of the target
//! grid. Refit coefficients take precedence over the penalized ones
//! when present.

use crate::lasso::IdentifiedModel;
use crate::spline::SplineSystem;
use crate::terms::TermLabel;
use crate::{Error, Field, Grid1D, Result};

/// Forecast scored against held-out observations.
#[derive(Debug, Clone)]
pub struct ForecastResult {
    pub predicted: Field,
    /// observed - predicted.
    pub residual: Field,
    /// Root-mean-square residual over space, one entry per time knot.
    pub rmse_per_step: Vec<f64>,
}

/// Active terms and their coefficients for a rollout: the refit
/// coefficients when present, otherwise the raw penalized ones
/// restricted to the support. An empty support means u_t = 0.
fn effective_terms(model: &IdentifiedModel, labels: &[TermLabel]) -> Vec<(TermLabel, f64)> {
    match &model.refit_beta {
        Some(refit) => model
            .support
            .iter()
            .zip(refit)
            .map(|(&j, &c)| (labels[j].clone(), c))
            .collect(),
        None => model
            .support
            .iter()
            .map(|&j| (labels[j].clone(), model.beta_raw[j]))
            .collect(),
    }
}

/// Roll `initial_slice` forward over the grid's time knots with the
/// explicit Euler method. Column 0 of the result is the initial slice;
/// column n advances column n-1 by `t_n - t_{n-1}`.
pub fn euler_forecast(
    initial_slice: &[f64],
    grid: &Grid1D,
    model: &IdentifiedModel,
    labels: &[TermLabel],
    alpha_x: f64,
) -> Result<Field> {
    let m = grid.m();
    if initial_slice.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: initial_slice.len() });
    }
    let terms = effective_terms(model, labels);
    let sys = SplineSystem::new(grid.x(), alpha_x, None)?;

    let mut values = Vec::with_capacity(m * grid.n());
    let mut state = initial_slice.to_vec();
    values.extend_from_slice(&state);
    for n in 1..grid.n() {
        let dt = grid.t()[n] - grid.t()[n - 1];
        let fit = sys.fit_slice(&state)?;
        for i in 0..m {
            let mut ut = 0.0;
            for (label, coef) in &terms {
                let mut v = 1.0;
                for f in label.factors() {
                    let d = match f.order {
                        0 => fit.value[i],
                        1 => fit.first[i],
                        2 => fit.second[i],
                        o => {
                            return Err(Error::InvalidParam(format!(
                                "term '{label}' needs derivative order {o}, above the spline's 2"
                            )))
                        }
                    };
                    v *= d.powi(f.power as i32);
                }
                ut += coef * v;
            }
            state[i] += dt * ut;
            if !state[i].is_finite() {
                return Err(Error::Blowup { step: n });
            }
        }
        values.extend_from_slice(&state);
    }
    Field::new(grid.clone(), values)
}

/// Residual field and per-step RMSE of a forecast against observations
/// on the same grid.
pub fn score_forecast(predicted: &Field, observed: &Field) -> Result<ForecastResult> {
    if predicted.grid() != observed.grid() {
        return Err(Error::InvalidField("forecast and observations live on different grids".into()));
    }
    let grid = predicted.grid();
    let (m, n) = (grid.m(), grid.n());
    let mut residual = Vec::with_capacity(m * n);
    let mut rmse = Vec::with_capacity(n);
    for k in 0..n {
        let mut ss = 0.0;
        for i in 0..m {
            let r = observed.get(i, k) - predicted.get(i, k);
            residual.push(r);
            ss += r * r;
        }
        rmse.push((ss / m as f64).sqrt());
    }
    Ok(ForecastResult {
        predicted: predicted.clone(),
        residual: Field::new(grid.clone(), residual)?,
        rmse_per_step: rmse,
    })
}
