//! Observation lattice and sampled fields.

use crate::{Error, Result};

/// Smallest admissible knot spacing relative to the axis span.
/// Near-duplicate knots make the spline systems numerically singular
/// and are rejected at construction.
const MIN_RELATIVE_SPACING: f64 = 1e-12;

/// A rectangular observation lattice: sorted spatial knots `x` (length
/// M) and sorted temporal knots `t` (length N).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x: Vec<f64>,
    t: Vec<f64>,
}

impl Grid1D {
    /// Build a grid from ascending knot vectors. Each axis needs at
    /// least 4 knots (cubic-spline systems are not defined below that),
    /// strictly increasing and finite, with no near-duplicate spacings.
    pub fn new(x: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        validate_axis(&x, "x")?;
        validate_axis(&t, "t")?;
        Ok(Self { x, t })
    }

    /// Uniform lattice over (0, x_max] x (0, t_max] with knots
    /// (i+1) * x_max / m and (n+1) * t_max / n_t.
    pub fn uniform(m: usize, n: usize, x_max: f64, t_max: f64) -> Result<Self> {
        if x_max <= 0.0 || t_max <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "axis spans must be positive, got x_max={x_max}, t_max={t_max}"
            )));
        }
        let x = (0..m).map(|i| (i + 1) as f64 * x_max / m as f64).collect();
        let t = (0..n).map(|k| (k + 1) as f64 * t_max / n as f64).collect();
        Self::new(x, t)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// Spatial resolution M.
    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// Temporal resolution N.
    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Grid restricted to the first `n` time knots.
    pub fn truncate_time(&self, n: usize) -> Result<Self> {
        Self::new(self.x.clone(), self.t[..n].to_vec())
    }
}

pub(crate) fn validate_axis_knots(knots: &[f64], name: &str) -> Result<()> {
    validate_axis(knots, name)
}

fn validate_axis(knots: &[f64], name: &str) -> Result<()> {
    if knots.len() < 4 {
        return Err(Error::InvalidGrid(format!(
            "axis {name} has {} knots; at least 4 required",
            knots.len()
        )));
    }
    if knots.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("axis {name} has non-finite knots")));
    }
    let span = knots[knots.len() - 1] - knots[0];
    if !(span > 0.0) {
        return Err(Error::InvalidGrid(format!("axis {name} is not increasing")));
    }
    for (i, w) in knots.windows(2).enumerate() {
        let h = w[1] - w[0];
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "axis {name} is not strictly increasing at index {i}"
            )));
        }
        if h < MIN_RELATIVE_SPACING * span {
            return Err(Error::InvalidGrid(format!(
                "axis {name} has a near-duplicate knot at index {i} (spacing {h:e})"
            )));
        }
    }
    Ok(())
}

/// An M x N array of scalar samples over a [`Grid1D`], entry (i, n)
/// holding the sample at (x_i, t_n).
///
/// Values are stored with the spatial index fastest (flat index
/// `n * M + i`), so a fixed-time slice is contiguous and the flat order
/// matches the dictionary's row convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    /// Wrap a value vector laid out as `n * M + i`. All entries must be
    /// finite and the length must match the grid.
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m() * grid.n() {
            return Err(Error::InvalidField(format!(
                "expected {} values for a {}x{} grid, got {}",
                grid.m() * grid.n(),
                grid.m(),
                grid.n(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (i, n) = (pos % grid.m(), pos / grid.m());
            return Err(Error::InvalidField(format!(
                "non-finite value at spatial index {i}, time index {n}"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Evaluate `f(x_i, t_n)` at every lattice point.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.m() * grid.n());
        for &t in grid.t() {
            for &x in grid.x() {
                values.push(f(x, t));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.grid.m() + i]
    }

    /// All samples at time index `n` (contiguous).
    pub fn time_slice(&self, n: usize) -> &[f64] {
        let m = self.grid.m();
        &self.values[n * m..(n + 1) * m]
    }

    /// Copy the time series at spatial index `i` into `buf`.
    pub fn space_series_into(&self, i: usize, buf: &mut Vec<f64>) {
        let m = self.grid.m();
        buf.clear();
        buf.extend((0..self.grid.n()).map(|n| self.values[n * m + i]));
    }

    /// Flat values in `n * M + i` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Field restricted to the first `n` time knots.
    pub fn truncate_time(&self, n: usize) -> Result<Self> {
        if n > self.grid.n() {
            return Err(Error::InvalidField(format!(
                "cannot keep {n} time samples of {}",
                self.grid.n()
            )));
        }
        let grid = self.grid.truncate_time(n)?;
        let values = self.values[..n * self.grid.m()].to_vec();
        Field::new(grid, values)
    }
}
