//! Design matrix over candidate PDE terms.
//!
//! Rows follow the field layout (row `n * M + i` holds the grid point
//! (x_i, t_n)), columns follow [`crate::terms::enumerate_terms`]. Raw
//! entries are exact products of derivative-estimate powers; for the
//! l1 stage each non-constant column is rescaled to root-mean-square
//! one, and the cross-products X^T X and X^T y are cached once so a
//! coordinate-descent sweep never touches the tall matrix again.

use std::io::Write;

use crate::parallel::map_indices;
use crate::spline::DerivativeEstimates;
use crate::terms::{enumerate_terms, TermLabel};
use crate::{Error, Result};

/// The assembled dictionary: labels, raw design matrix, response and
/// the scaling metadata needed to move between raw and scaled
/// coefficients.
#[derive(Debug, Clone)]
pub struct Dictionary {
    labels: Vec<TermLabel>,
    mn: usize,
    /// Raw (unscaled) design matrix, row-major MN x K.
    x_raw: Vec<f64>,
    /// Response: temporal-derivative estimates, flattened n * M + i.
    y: Vec<f64>,
    /// Multiplier applied to each raw column to reach RMS 1
    /// (1 for the intercept and for exactly-zero columns).
    scales: Vec<f64>,
    /// Raw column root-mean-squares, retained for de-scaling.
    raw_rms: Vec<f64>,
    /// Columns that are identically zero.
    degenerate: Vec<bool>,
    /// Raw Gram matrix X^T X, row-major K x K.
    gram_raw: Vec<f64>,
    /// Raw correlations X^T y.
    xty_raw: Vec<f64>,
    /// y^T y.
    yty: f64,
}

/// Build the dictionary for polynomial order `p_max` and derivative
/// order `q_max` (at most 2: the spline stage provides u, u_x, u_xx).
pub fn build_dictionary(
    est: &DerivativeEstimates,
    p_max: usize,
    q_max: usize,
) -> Result<Dictionary> {
    if q_max > 2 {
        return Err(Error::InvalidParam(format!(
            "q_max = {q_max} unsupported: the estimation stage provides derivatives up to order 2"
        )));
    }
    let labels = enumerate_terms(p_max, q_max)?;
    let k = labels.len();
    let (m, n) = (est.grid().m(), est.grid().n());
    let mn = m * n;

    // Rows are independent; fill one time-block per task.
    let blocks: Vec<Vec<f64>> = map_indices(n, true, |t_idx| {
        let mut block = Vec::with_capacity(m * k);
        for i in 0..m {
            for label in &labels {
                let mut v = 1.0;
                for f in label.factors() {
                    v *= est.spatial(f.order, i, t_idx).powi(f.power as i32);
                }
                block.push(v);
            }
        }
        block
    });
    let mut x_raw = Vec::with_capacity(mn * k);
    for block in blocks {
        x_raw.extend(block);
    }
    if let Some(pos) = x_raw.iter().position(|v| !v.is_finite()) {
        let row = pos / k;
        return Err(Error::InvalidField(format!(
            "non-finite dictionary entry for term '{}' at grid point (i={}, n={})",
            labels[pos % k],
            row % m,
            row / m
        )));
    }
    let y = est.ut_flat().to_vec();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidField("non-finite temporal-derivative estimate".into()));
    }
    Ok(assemble(labels, x_raw, y, mn))
}

/// Assemble a dictionary from explicit raw columns. Intended for
/// synthetic designs in experiments and oracle tests; `build_dictionary`
/// is the production path. Columns whose label is the intercept are
/// left unscaled.
pub fn from_columns(
    labels: Vec<TermLabel>,
    columns: &[Vec<f64>],
    y: Vec<f64>,
) -> Result<Dictionary> {
    if labels.len() != columns.len() || labels.is_empty() {
        return Err(Error::InvalidParam(format!(
            "need one label per column, got {} labels and {} columns",
            labels.len(),
            columns.len()
        )));
    }
    let mn = y.len();
    if mn == 0 {
        return Err(Error::InvalidParam("empty response vector".into()));
    }
    for (j, col) in columns.iter().enumerate() {
        if col.len() != mn {
            return Err(Error::LengthMismatch { expected: mn, got: col.len() });
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite entry in column {j}")));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidField("non-finite response entry".into()));
    }
    let k = labels.len();
    let mut x_raw = vec![0.0; mn * k];
    for row in 0..mn {
        for (j, col) in columns.iter().enumerate() {
            x_raw[row * k + j] = col[row];
        }
    }
    Ok(assemble(labels, x_raw, y, mn))
}

fn assemble(labels: Vec<TermLabel>, x_raw: Vec<f64>, y: Vec<f64>, mn: usize) -> Dictionary {
    let k = labels.len();
    let mut raw_rms = vec![0.0; k];
    for row in 0..mn {
        for j in 0..k {
            let v = x_raw[row * k + j];
            raw_rms[j] += v * v;
        }
    }
    let mut scales = vec![1.0; k];
    let mut degenerate = vec![false; k];
    for j in 0..k {
        raw_rms[j] = (raw_rms[j] / mn as f64).sqrt();
        if labels[j].is_intercept() {
            continue; // intercept stays unscaled
        }
        if raw_rms[j] == 0.0 {
            degenerate[j] = true;
        } else {
            scales[j] = 1.0 / raw_rms[j];
        }
    }

    let mut gram_raw = vec![0.0; k * k];
    let mut xty_raw = vec![0.0; k];
    let mut yty = 0.0;
    for row in 0..mn {
        let xr = &x_raw[row * k..(row + 1) * k];
        for a in 0..k {
            for b in a..k {
                gram_raw[a * k + b] += xr[a] * xr[b];
            }
            xty_raw[a] += xr[a] * y[row];
        }
        yty += y[row] * y[row];
    }
    for a in 0..k {
        for b in 0..a {
            gram_raw[a * k + b] = gram_raw[b * k + a];
        }
    }

    Dictionary { labels, mn, x_raw, y, scales, raw_rms, degenerate, gram_raw, xty_raw, yty }
}

impl Dictionary {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Number of rows MN.
    pub fn rows(&self) -> usize {
        self.mn
    }

    pub fn labels(&self) -> &[TermLabel] {
        &self.labels
    }

    pub fn label_index(&self, label: &TermLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Raw design entry at (row, column).
    pub fn x_raw(&self, row: usize, col: usize) -> f64 {
        self.x_raw[row * self.k() + col]
    }

    /// Scaled design entry at (row, column).
    pub fn x_scaled(&self, row: usize, col: usize) -> f64 {
        self.x_raw(row, col) * self.scales[col]
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn raw_rms(&self) -> &[f64] {
        &self.raw_rms
    }

    pub fn is_degenerate(&self, col: usize) -> bool {
        self.degenerate[col]
    }

    pub fn gram_raw(&self, a: usize, b: usize) -> f64 {
        self.gram_raw[a * self.k() + b]
    }

    pub fn gram_scaled(&self, a: usize, b: usize) -> f64 {
        self.gram_raw(a, b) * self.scales[a] * self.scales[b]
    }

    pub fn xty_raw(&self, a: usize) -> f64 {
        self.xty_raw[a]
    }

    pub fn xty_scaled(&self, a: usize) -> f64 {
        self.xty_raw[a] * self.scales[a]
    }

    pub fn yty(&self) -> f64 {
        self.yty
    }

    /// Map scaled coefficients back to raw column units:
    /// `beta_raw[j] = beta_scaled[j] * scales[j]`.
    pub fn descale_coefficients(&self, beta_scaled: &[f64]) -> Result<Vec<f64>> {
        if beta_scaled.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), got: beta_scaled.len() });
        }
        Ok(beta_scaled.iter().zip(&self.scales).map(|(b, s)| b * s).collect())
    }

    /// Prediction X_raw * beta_raw for one row.
    pub fn predict_row_raw(&self, row: usize, beta_raw: &[f64]) -> f64 {
        let k = self.k();
        let xr = &self.x_raw[row * k..(row + 1) * k];
        xr.iter().zip(beta_raw).map(|(x, b)| x * b).sum()
    }

    /// CSV dump of the raw dictionary: serialized labels plus `u_t`,
    /// one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self
            .labels
            .iter()
            .map(|l| l.to_string())
            .chain(std::iter::once("u_t".to_string()))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        let k = self.k();
        for row in 0..self.mn {
            let mut cells: Vec<String> =
                (0..k).map(|j| format!("{}", self.x_raw(row, j))).collect();
            cells.push(format!("{}", self.y[row]));
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}
