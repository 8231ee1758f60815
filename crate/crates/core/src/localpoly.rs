//! Local polynomial regression baseline for derivative estimation.
//!
//! Exists to reproduce the complexity comparison against the spline
//! stage: every evaluation point solves a kernel-weighted least-squares
//! system whose normal equations are assembled as moment sums over all
//! M knots, so a full-field estimate costs order M^2 N (respectively
//! M N^2 along the time axis) counted multiply-adds.

use crate::{opcount, Error, Result};

/// Epanechnikov kernel `0.75 * max(0, 1 - x^2)`.
pub fn epanechnikov(x: f64) -> f64 {
    0.75 * (1.0 - x * x).max(0.0)
}

/// Configuration of a local polynomial fit targeting the `target_order`
/// derivative with a degree `fit_degree` polynomial.
#[derive(Debug, Clone)]
pub struct LocalPolyConfig {
    /// Derivative order to estimate.
    pub target_order: usize,
    /// Polynomial degree of the local fit; defaults to target_order + 3
    /// (the minimax-efficient choice).
    pub fit_degree: usize,
    /// Kernel bandwidth in knot units; `None` selects the default
    /// `2 * (fit_degree + 1) * max_spacing`, enlarged if necessary so
    /// every evaluation point keeps at least fit_degree + 1
    /// kernel-positive neighbors.
    pub bandwidth: Option<f64>,
}

impl LocalPolyConfig {
    pub fn new(target_order: usize) -> Self {
        Self { target_order, fit_degree: target_order + 3, bandwidth: None }
    }

    pub fn with_bandwidth(mut self, h: f64) -> Self {
        self.bandwidth = Some(h);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.fit_degree < self.target_order {
            return Err(Error::InvalidParam(format!(
                "fit_degree {} below target_order {}",
                self.fit_degree, self.target_order
            )));
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParam(format!("bandwidth must be positive, got {h}")));
            }
        }
        Ok(())
    }

    /// Bandwidth actually used over the given knots and eval points.
    pub fn resolved_bandwidth(&self, knots: &[f64], eval_points: &[f64]) -> Result<f64> {
        self.validate()?;
        if let Some(h) = self.bandwidth {
            return Ok(h);
        }
        let max_h = knots.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
        let mut h = 2.0 * (self.fit_degree + 1) as f64 * max_h;
        // Enlarge until the sparsest evaluation point keeps
        // fit_degree + 1 strictly interior kernel neighbors.
        let needed = self.fit_degree + 1;
        let mut worst = 0.0_f64;
        for &x in eval_points {
            worst = worst.max(kth_nearest_distance(knots, x, needed));
        }
        if worst >= h {
            h = worst * (1.0 + 1e-9) + f64::EPSILON;
        }
        Ok(h)
    }
}

/// Distance from `x` to its `k`-th nearest knot (1-based), using the
/// sorted order of the knots.
fn kth_nearest_distance(knots: &[f64], x: f64, k: usize) -> f64 {
    let n = knots.len();
    let mut right = knots.partition_point(|&v| v < x);
    let mut left = right;
    let mut dist = 0.0;
    for _ in 0..k.min(n) {
        let dl = if left > 0 { x - knots[left - 1] } else { f64::INFINITY };
        let dr = if right < n { knots[right] - x } else { f64::INFINITY };
        if dl <= dr {
            dist = dl;
            left -= 1;
        } else {
            dist = dr;
            right += 1;
        }
    }
    dist
}

/// Kernel-weighted local polynomial fit of one data slice.
///
/// Returns, for each evaluation point, the fitted coefficients of the
/// shifted monomial basis `(x_i - x)^j`, j = 0..=fit_degree, which the
/// model treats directly as the derivative estimates of those orders
/// (no factorial rescale). Fails with the evaluation index if the
/// normal matrix is singular there.
pub fn localpoly_fit_slice(
    slice: &[f64],
    knots: &[f64],
    eval_points: &[f64],
    config: &LocalPolyConfig,
) -> Result<Vec<Vec<f64>>> {
    if slice.len() != knots.len() {
        return Err(Error::LengthMismatch { expected: knots.len(), got: slice.len() });
    }
    crate::grid::validate_axis_knots(knots, "localpoly")?;
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    if eval_points.iter().any(|&x| !(x >= lo && x <= hi)) {
        return Err(Error::InvalidParam("evaluation point outside the knot range".into()));
    }
    let h = config.resolved_bandwidth(knots, eval_points)?;
    let p = config.fit_degree;
    let dim = p + 1;

    let mut out = Vec::with_capacity(eval_points.len());
    let mut ops = 0u64;
    let mut moments = vec![0.0; 2 * p + 1];
    let mut rhs = vec![0.0; dim];
    for (idx, &x) in eval_points.iter().enumerate() {
        moments.iter_mut().for_each(|v| *v = 0.0);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        // Moment sums over every knot, as in the closed-form normal
        // equations; zero kernel weights still cost their multiplies.
        // The monomials are taken in z = (x_i - x) / h to keep the
        // moment matrix well conditioned; coefficients are mapped back
        // to the (x_i - x)^j basis afterwards.
        for (i, &xi) in knots.iter().enumerate() {
            let z = (xi - x) / h;
            let w = epanechnikov(z);
            ops += 3;
            let mut pw = 1.0;
            let wu = w * slice[i];
            ops += 1;
            for j in 0..=2 * p {
                moments[j] += w * pw;
                if j < dim {
                    rhs[j] += wu * pw;
                    ops += 1;
                }
                pw *= z;
                ops += 2;
            }
        }
        let mut normal = vec![vec![0.0; dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                normal[a][b] = moments[a + b];
            }
        }
        let mut coeffs = solve_dense(&mut normal, &mut rhs.clone(), &mut ops).map_err(|_| {
            Error::Singular(format!(
                "local polynomial normal matrix singular at evaluation index {idx} (x = {x}); \
                 too few kernel-positive neighbors"
            ))
        })?;
        let mut hp = 1.0;
        for c in coeffs.iter_mut() {
            *c /= hp;
            hp *= h;
            ops += 2;
        }
        out.push(coeffs);
    }
    opcount::add(ops);
    Ok(out)
}

/// Gaussian elimination with partial pivoting for the small normal
/// systems (dimension fit_degree + 1).
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64], ops: &mut u64) -> std::result::Result<Vec<f64>, ()> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() <= 1e-12 * scale.max(1e-300) {
            return Err(());
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            *ops += 1;
            for c in col..n {
                a[r][c] -= factor * a[col][c];
                *ops += 1;
            }
            b[r] -= factor * b[col];
            *ops += 1;
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
            *ops += 1;
        }
        x[row] = acc / a[row][row];
        *ops += 1;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_values() {
        assert_abs_diff_eq!(epanechnikov(0.0), 0.75, epsilon = 0.0);
        assert_abs_diff_eq!(epanechnikov(1.0), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(epanechnikov(-1.0), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(epanechnikov(0.5), 0.5625, epsilon = 1e-15);
        assert_abs_diff_eq!(epanechnikov(2.0), 0.0, epsilon = 0.0);
    }

    #[test]
    fn constant_slice_reproduced_exactly() {
        let knots: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let slice = vec![1.25; 20];
        let cfg = LocalPolyConfig::new(1);
        let fits = localpoly_fit_slice(&slice, &knots, &knots, &cfg).unwrap();
        for fit in fits {
            assert_abs_diff_eq!(fit[0], 1.25, epsilon = 1e-9);
            for &d in &fit[1..] {
                assert_abs_diff_eq!(d, 0.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn polynomials_in_span_are_recovered() {
        // Degree-4 polynomial, fit degree 4 with bandwidth covering all
        // knots: the shifted-basis coefficients are recovered exactly.
        let knots: Vec<f64> = (0..15).map(|i| i as f64 * 0.1).collect();
        let poly = |x: f64| 1.0 + x * (0.5 + x * (-2.0 + x * (0.25 + 0.125 * x)));
        let slice: Vec<f64> = knots.iter().map(|&x| poly(x)).collect();
        let cfg = LocalPolyConfig { target_order: 1, fit_degree: 4, bandwidth: Some(10.0) };
        let evals = [0.3, 0.7, 1.1];
        let fits = localpoly_fit_slice(&slice, &knots, &evals, &cfg).unwrap();
        for (fit, &x) in fits.iter().zip(evals.iter()) {
            // Expand poly around x: coefficients of (xi - x)^j.
            let c0 = poly(x);
            let c1 = 0.5 - 4.0 * x + 0.75 * x * x + 0.5 * x * x * x;
            let c2 = -2.0 + 0.75 * x + 0.75 * x * x;
            assert_abs_diff_eq!(fit[0], c0, epsilon = 1e-8);
            assert_abs_diff_eq!(fit[1], c1, epsilon = 1e-8);
            assert_abs_diff_eq!(fit[2], c2, epsilon = 1e-7);
        }
    }

    #[test]
    fn too_few_neighbors_is_singular_with_index() {
        let knots: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let slice = vec![1.0; 10];
        let cfg = LocalPolyConfig { target_order: 1, fit_degree: 4, bandwidth: Some(0.5) };
        let err = localpoly_fit_slice(&slice, &knots, &[4.0], &cfg).unwrap_err();
        match err {
            Error::Singular(msg) => assert!(msg.contains("index 0")),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn default_bandwidth_keeps_enough_neighbors() {
        let knots: Vec<f64> = (0..30).map(|i| (i as f64).powf(1.2)).collect();
        let cfg = LocalPolyConfig::new(2);
        let h = cfg.resolved_bandwidth(&knots, &knots).unwrap();
        for &x in &knots {
            let count = knots.iter().filter(|&&k| (k - x).abs() < h).count();
            assert!(count >= cfg.fit_degree + 1, "only {count} neighbors at {x}");
        }
    }
}
