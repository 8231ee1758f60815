//! Penalized natural cubic smoothing splines on a knot axis.
//!
//! For knots x_0 < ... < x_{M-1} with spacings h_i and a smoothing
//! weight alpha in (0, 1], the fitted values solve
//! `Z f = alpha W u` with `Z = alpha W + (1 - alpha) A^T M A`, where A
//! is the second-difference band matrix and M the tridiagonal overlap
//! matrix. Z is symmetric positive definite with bandwidth 3, so one
//! LDL^T factorization serves every slice sharing the axis. Second
//! derivatives come from the tridiagonal system `M sigma = A f` with
//! natural boundary values pinned to zero, and first derivatives from
//! the tridiagonal system `Q theta = B f`.

use crate::banded::{BandLdl, BandedSym};
use crate::grid::Field;
use crate::parallel::map_indices;
use crate::{opcount, Error, Grid1D, Result};

/// Smoothing weight from the knot count: `1 / (1 + m^(-4/7))`.
/// Approaches 1 from below as the axis is refined.
pub fn default_alpha(n_knots: usize) -> f64 {
    1.0 / (1.0 + (n_knots as f64).powf(-4.0 / 7.0))
}

/// Factored spline systems for one knot axis, reusable across every
/// data slice observed on that axis.
#[derive(Debug, Clone)]
pub struct SplineSystem {
    knots: Vec<f64>,
    h: Vec<f64>,
    alpha: f64,
    weights: Vec<f64>,
    z: BandedSym,
    m: BandedSym,
    q: BandedSym,
    z_ldl: BandLdl,
    m_ldl: BandLdl,
    q_ldl: BandLdl,
}

/// Per-slice spline output: fitted values, first and second derivative
/// estimates at the knots.
#[derive(Debug, Clone)]
pub struct SliceFit {
    /// Fitted values f_hat (the smoothed slice).
    pub value: Vec<f64>,
    /// First-derivative estimates theta_hat.
    pub first: Vec<f64>,
    /// Second-derivative estimates sigma_hat; the end entries are
    /// exactly zero (natural boundary).
    pub second: Vec<f64>,
}

impl SplineSystem {
    /// Assemble and factor the axis systems. Knots must be strictly
    /// increasing with at least 4 entries, `alpha` in (0, 1], and all
    /// weights positive (default 1).
    pub fn new(knots: &[f64], alpha: f64, weights: Option<&[f64]>) -> Result<Self> {
        crate::grid::validate_axis_knots(knots, "spline")?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParam(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let m_len = knots.len();
        let weights = match weights {
            Some(w) => {
                if w.len() != m_len {
                    return Err(Error::LengthMismatch { expected: m_len, got: w.len() });
                }
                if w.iter().any(|&wi| !(wi > 0.0) || !wi.is_finite()) {
                    return Err(Error::InvalidParam("weights must be positive and finite".into()));
                }
                w.to_vec()
            }
            None => vec![1.0; m_len],
        };
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();

        let m_mat = overlap_matrix(&h);
        let q_mat = first_derivative_matrix(&h);
        let z_mat = system_matrix(&h, alpha, &weights);

        let z_ldl = z_mat.factor()?;
        let m_ldl = m_mat.factor()?;
        let q_ldl = q_mat.factor()?;

        Ok(Self {
            knots: knots.to_vec(),
            h,
            alpha,
            weights,
            z: z_mat,
            m: m_mat,
            q: q_mat,
            z_ldl,
            m_ldl,
            q_ldl,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The seven-diagonal system matrix Z.
    pub fn z_matrix(&self) -> &BandedSym {
        &self.z
    }

    /// The tridiagonal overlap matrix M (order M-2).
    pub fn m_matrix(&self) -> &BandedSym {
        &self.m
    }

    /// The tridiagonal first-derivative matrix Q.
    pub fn q_matrix(&self) -> &BandedSym {
        &self.q
    }

    /// Second-difference image `A f` (length M-2).
    pub fn apply_second_difference(&self, f: &[f64]) -> Vec<f64> {
        let h = &self.h;
        let mut out = Vec::with_capacity(f.len() - 2);
        let mut ops = 0u64;
        for r in 0..f.len() - 2 {
            out.push(
                f[r] / h[r] - f[r + 1] * (1.0 / h[r] + 1.0 / h[r + 1]) + f[r + 2] / h[r + 1],
            );
            ops += 3;
        }
        opcount::add(ops);
        out
    }

    /// Right-hand side `B f` of the first-derivative system.
    fn apply_b(&self, f: &[f64]) -> Vec<f64> {
        let h = &self.h;
        let m = f.len();
        let mut q = Vec::with_capacity(m);
        let mut ops = 0u64;
        q.push(3.0 * (f[1] - f[0]) / (h[0] * h[0]));
        ops += 2;
        for i in 1..m - 1 {
            q.push(
                3.0 * (f[i + 1] - f[i]) / (h[i] * h[i])
                    + 3.0 * (f[i] - f[i - 1]) / (h[i - 1] * h[i - 1]),
            );
            ops += 4;
        }
        q.push(3.0 * (f[m - 1] - f[m - 2]) / (h[m - 2] * h[m - 2]));
        ops += 2;
        opcount::add(ops);
        q
    }

    /// Fit one data slice: smoothed values, first and second
    /// derivatives at the knots, all through the banded factors.
    pub fn fit_slice(&self, slice: &[f64]) -> Result<SliceFit> {
        let m = self.knots.len();
        if slice.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: slice.len() });
        }
        let mut rhs: Vec<f64> = Vec::with_capacity(m);
        for i in 0..m {
            rhs.push(self.alpha * self.weights[i] * slice[i]);
        }
        opcount::add(2 * m as u64);
        let mut value = rhs;
        self.z_ldl.solve_in_place(&mut value);

        let mut second = self.apply_second_difference(&value);
        self.m_ldl.solve_in_place(&mut second);
        second.insert(0, 0.0);
        second.push(0.0);

        let mut first = self.apply_b(&value);
        self.q_ldl.solve_in_place(&mut first);

        Ok(SliceFit { value, first, second })
    }
}

/// Tridiagonal overlap matrix M of order M-2:
/// diag (h_i + h_{i+1}) / 3, off-diagonal h_{i+1} / 6.
fn overlap_matrix(h: &[f64]) -> BandedSym {
    let n = h.len() - 1; // equals M - 2
    let mut m = BandedSym::zeros(n, 1);
    for r in 0..n {
        m.add(r, r, (h[r] + h[r + 1]) / 3.0);
        if r + 1 < n {
            m.add(r + 1, r, h[r + 1] / 6.0);
        }
    }
    m
}

/// Tridiagonal matrix Q of the first-derivative relations
/// `Q theta = B f`, including the natural-boundary end rows.
fn first_derivative_matrix(h: &[f64]) -> BandedSym {
    let m = h.len() + 1;
    let mut q = BandedSym::zeros(m, 1);
    q.add(0, 0, 2.0 / h[0]);
    for i in 1..m - 1 {
        q.add(i, i, 2.0 / h[i - 1] + 2.0 / h[i]);
    }
    q.add(m - 1, m - 1, 2.0 / h[m - 2]);
    for i in 0..m - 1 {
        q.add(i + 1, i, 1.0 / h[i]);
    }
    q
}

/// Seven-diagonal system matrix `Z = alpha W + (1 - alpha) A^T M A`.
fn system_matrix(h: &[f64], alpha: f64, weights: &[f64]) -> BandedSym {
    let m = h.len() + 1;
    let rows = m - 2;
    // Nonzeros of row r of A: columns r, r+1, r+2.
    let a_entry = |r: usize, c: usize| -> f64 {
        if c == r {
            1.0 / h[r]
        } else if c == r + 1 {
            -1.0 / h[r] - 1.0 / h[r + 1]
        } else if c == r + 2 {
            1.0 / h[r + 1]
        } else {
            0.0
        }
    };
    let m_entry = |r: usize, s: usize| -> f64 {
        if r == s {
            (h[r] + h[r + 1]) / 3.0
        } else {
            let lo = r.min(s);
            h[lo + 1] / 6.0
        }
    };
    let mut z = BandedSym::zeros(m, 3);
    let mut ops = 0u64;
    for i in 0..m {
        for j in i.saturating_sub(3)..=i {
            let mut acc = 0.0;
            let r_lo = i.saturating_sub(2);
            let r_hi = i.min(rows.saturating_sub(1));
            for r in r_lo..=r_hi {
                if a_entry(r, i) == 0.0 {
                    continue;
                }
                let s_lo = j.saturating_sub(2).max(r.saturating_sub(1));
                let s_hi = j.min(rows.saturating_sub(1)).min(r + 1);
                for s in s_lo..=s_hi {
                    acc += a_entry(r, i) * m_entry(r, s) * a_entry(s, j);
                    ops += 2;
                }
            }
            let mut v = (1.0 - alpha) * acc;
            if i == j {
                v += alpha * weights[i];
            }
            ops += 2;
            if v != 0.0 || i == j {
                z.add(i, j, v);
            }
        }
    }
    opcount::add(ops);
    z
}

/// Spline estimates on a full grid: values, first and second spatial
/// derivatives, and the first temporal derivative, each stored in the
/// field layout `n * M + i`.
#[derive(Debug, Clone)]
pub struct DerivativeEstimates {
    grid: Grid1D,
    u_hat: Vec<f64>,
    ux_hat: Vec<f64>,
    uxx_hat: Vec<f64>,
    ut_hat: Vec<f64>,
}

impl DerivativeEstimates {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn u(&self, i: usize, n: usize) -> f64 {
        self.u_hat[n * self.grid.m() + i]
    }

    pub fn ux(&self, i: usize, n: usize) -> f64 {
        self.ux_hat[n * self.grid.m() + i]
    }

    pub fn uxx(&self, i: usize, n: usize) -> f64 {
        self.uxx_hat[n * self.grid.m() + i]
    }

    pub fn ut(&self, i: usize, n: usize) -> f64 {
        self.ut_hat[n * self.grid.m() + i]
    }

    /// Flat temporal-derivative estimates in `n * M + i` order.
    pub fn ut_flat(&self) -> &[f64] {
        &self.ut_hat
    }

    /// Derivative of the requested spatial order (0, 1 or 2) at (i, n).
    pub fn spatial(&self, order: usize, i: usize, n: usize) -> f64 {
        match order {
            0 => self.u(i, n),
            1 => self.ux(i, n),
            2 => self.uxx(i, n),
            _ => panic!("spatial derivative order {order} not estimated"),
        }
    }
}

/// Estimate u, u_x, u_xx (spline fits along x for every time index) and
/// u_t (spline fits along t of the raw data for every spatial index).
/// Slices run concurrently under the `parallel` feature.
pub fn estimate_derivatives(field: &Field, alpha_x: f64, alpha_t: f64) -> Result<DerivativeEstimates> {
    estimate_derivatives_impl(field, alpha_x, alpha_t, true)
}

/// Sequential variant of [`estimate_derivatives`]; same results.
pub fn estimate_derivatives_seq(
    field: &Field,
    alpha_x: f64,
    alpha_t: f64,
) -> Result<DerivativeEstimates> {
    estimate_derivatives_impl(field, alpha_x, alpha_t, false)
}

fn estimate_derivatives_impl(
    field: &Field,
    alpha_x: f64,
    alpha_t: f64,
    parallel: bool,
) -> Result<DerivativeEstimates> {
    let grid = field.grid();
    let (m, n) = (grid.m(), grid.n());
    let sys_x = SplineSystem::new(grid.x(), alpha_x, None)?;
    let sys_t = SplineSystem::new(grid.t(), alpha_t, None)?;

    let x_fits: Vec<Result<SliceFit>> =
        map_indices(n, parallel, |k| sys_x.fit_slice(field.time_slice(k)));
    let t_fits: Vec<Result<Vec<f64>>> = map_indices(m, parallel, |i| {
        let mut series = Vec::new();
        field.space_series_into(i, &mut series);
        sys_t.fit_slice(&series).map(|fit| fit.first)
    });

    let mut u_hat = vec![0.0; m * n];
    let mut ux_hat = vec![0.0; m * n];
    let mut uxx_hat = vec![0.0; m * n];
    let mut ut_hat = vec![0.0; m * n];
    for (k, fit) in x_fits.into_iter().enumerate() {
        let fit = fit?;
        u_hat[k * m..(k + 1) * m].copy_from_slice(&fit.value);
        ux_hat[k * m..(k + 1) * m].copy_from_slice(&fit.first);
        uxx_hat[k * m..(k + 1) * m].copy_from_slice(&fit.second);
    }
    for (i, fit) in t_fits.into_iter().enumerate() {
        let first = fit?;
        for (k, v) in first.into_iter().enumerate() {
            ut_hat[k * m + i] = v;
        }
    }
    Ok(DerivativeEstimates { grid: grid.clone(), u_hat, ux_hat, uxx_hat, ut_hat })
}
