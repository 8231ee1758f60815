//! Shared oracles for the integration tests: dense linear algebra and
//! reference solvers kept independent of the library's banded /
//! coordinate-descent code paths.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        assert!(a[col][col].abs() > 0.0, "singular oracle system");
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Dense matrix-vector product.
pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

/// Random symmetric positive definite banded matrix as a dense array,
/// built by diagonal dominance.
pub fn random_spd_banded(n: usize, bandwidth: usize, rng: &mut StdRng) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 1..=bandwidth {
            if i + k < n {
                let v: f64 = rng.random_range(-1.0..1.0);
                a[i][i + k] = v;
                a[i + k][i] = v;
            }
        }
    }
    for i in 0..n {
        let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| a[i][j].abs()).sum();
        a[i][i] = row_sum + rng.random_range(0.5..2.0);
    }
    a
}

/// Dense reference of the full per-slice spline computation: assembles
/// A, M, W, Z, Q and B as dense matrices straight from their
/// definitions and solves with dense elimination.
pub struct DenseSplineOracle {
    pub value: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

pub fn dense_spline_fit(knots: &[f64], alpha: f64, slice: &[f64]) -> DenseSplineOracle {
    let m = knots.len();
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();

    let mut a = vec![vec![0.0; m]; m - 2];
    for r in 0..m - 2 {
        a[r][r] = 1.0 / h[r];
        a[r][r + 1] = -1.0 / h[r] - 1.0 / h[r + 1];
        a[r][r + 2] = 1.0 / h[r + 1];
    }
    let mut mm = vec![vec![0.0; m - 2]; m - 2];
    for r in 0..m - 2 {
        mm[r][r] = (h[r] + h[r + 1]) / 3.0;
        if r + 1 < m - 2 {
            mm[r][r + 1] = h[r + 1] / 6.0;
            mm[r + 1][r] = h[r + 1] / 6.0;
        }
    }
    // Z = alpha I + (1 - alpha) A^T M A  (unit weights).
    let mut z = vec![vec![0.0; m]; m];
    for i in 0..m {
        z[i][i] = alpha;
    }
    for r in 0..m - 2 {
        for s in 0..m - 2 {
            if mm[r][s] == 0.0 {
                continue;
            }
            for ci in 0..m {
                if a[r][ci] == 0.0 {
                    continue;
                }
                for cj in 0..m {
                    if a[s][cj] == 0.0 {
                        continue;
                    }
                    z[ci][cj] += (1.0 - alpha) * a[r][ci] * mm[r][s] * a[s][cj];
                }
            }
        }
    }
    let rhs: Vec<f64> = slice.iter().map(|u| alpha * u).collect();
    let value = dense_solve(z, rhs);

    let af = dense_matvec(&a, &value);
    let sig_int = dense_solve(mm, af);
    let mut second = vec![0.0; m];
    second[1..m - 1].copy_from_slice(&sig_int);

    let mut q = vec![vec![0.0; m]; m];
    q[0][0] = 2.0 / h[0];
    q[0][1] = 1.0 / h[0];
    for i in 1..m - 1 {
        q[i][i - 1] = 1.0 / h[i - 1];
        q[i][i] = 2.0 / h[i - 1] + 2.0 / h[i];
        q[i][i + 1] = 1.0 / h[i];
    }
    q[m - 1][m - 2] = 1.0 / h[m - 2];
    q[m - 1][m - 1] = 2.0 / h[m - 2];
    let mut bq = vec![0.0; m];
    bq[0] = 3.0 * (value[1] - value[0]) / (h[0] * h[0]);
    for i in 1..m - 1 {
        bq[i] = 3.0 * (value[i + 1] - value[i]) / (h[i] * h[i])
            + 3.0 * (value[i] - value[i - 1]) / (h[i - 1] * h[i - 1]);
    }
    bq[m - 1] = 3.0 * (value[m - 1] - value[m - 2]) / (h[m - 2] * h[m - 2]);
    let first = dense_solve(q, bq);

    DenseSplineOracle { value, first, second }
}

/// l1-penalized objective on an explicit dense design.
pub fn lasso_objective(x: &[Vec<f64>], y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let mn = y.len() as f64;
    let mut ss = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let pred: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        ss += (yi - pred) * (yi - pred);
    }
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    ss / (2.0 * mn) + lambda * l1
}

/// Brute-force minimizer of the l1-penalized objective: coarse grid
/// seeding followed by a long FISTA polish (an independent proximal
/// full-gradient route, unlike the library's cyclic coordinate
/// descent).
pub fn lasso_brute_force(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Vec<f64> {
    let k = x[0].len();
    let mn = y.len() as f64;

    // Lipschitz bound for the gradient: ||X^T X||_F / MN.
    let mut gram = vec![vec![0.0; k]; k];
    for row in x {
        for a in 0..k {
            for b in 0..k {
                gram[a][b] += row[a] * row[b];
            }
        }
    }
    let lip = gram
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        / mn;
    let step = 1.0 / lip.max(1e-12);

    // Coarse grid seed around the origin.
    let mut best = vec![0.0; k];
    let mut best_obj = lasso_objective(x, y, &best, lambda);
    let radius = 5.0;
    let grid_steps = 7;
    let mut idx = vec![0usize; k];
    loop {
        let cand: Vec<f64> = idx
            .iter()
            .map(|&i| -radius + 2.0 * radius * i as f64 / (grid_steps - 1) as f64)
            .collect();
        let obj = lasso_objective(x, y, &cand, lambda);
        if obj < best_obj {
            best_obj = obj;
            best = cand;
        }
        let mut carry = true;
        for d in idx.iter_mut() {
            if carry {
                *d += 1;
                if *d == grid_steps {
                    *d = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }

    // FISTA polish.
    let soft = |v: f64, a: f64| {
        if v > a {
            v - a
        } else if v < -a {
            v + a
        } else {
            0.0
        }
    };
    let mut beta = best.clone();
    let mut momentum = beta.clone();
    let mut t_acc = 1.0_f64;
    for _ in 0..200_000 {
        // gradient at the momentum point
        let mut grad = vec![0.0; k];
        for (row, &yi) in x.iter().zip(y) {
            let pred: f64 = row.iter().zip(&momentum).map(|(a, b)| a * b).sum();
            let r = pred - yi;
            for (g, &xv) in grad.iter_mut().zip(row) {
                *g += r * xv;
            }
        }
        let mut next = vec![0.0; k];
        let mut change = 0.0_f64;
        for j in 0..k {
            next[j] = soft(momentum[j] - step * grad[j] / mn, step * lambda);
            change = change.max((next[j] - beta[j]).abs());
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_acc * t_acc).sqrt());
        for j in 0..k {
            momentum[j] = next[j] + (t_acc - 1.0) / t_next * (next[j] - beta[j]);
        }
        beta = next;
        t_acc = t_next;
        if change < 1e-14 {
            break;
        }
    }
    beta
}

/// Second-order conservative finite-volume reference for the inviscid
/// Burgers equation u_t = -1/2 u u_x (flux u^2/4) with minmod-limited
/// reconstruction, Godunov flux and SSP-RK2 stepping on [0, 1] with
/// zero boundary states. Returns cell averages of `cells` cells at the
/// requested times.
pub fn burgers_fv_reference(cells: usize, times: &[f64]) -> Vec<Vec<f64>> {
    let dx = 1.0 / cells as f64;
    // Exact cell averages of sin(2 pi x).
    let tau = 2.0 * std::f64::consts::PI;
    let mut v: Vec<f64> = (0..cells)
        .map(|j| {
            let a = j as f64 * dx;
            let b = a + dx;
            ((tau * a).cos() - (tau * b).cos()) / (tau * dx)
        })
        .collect();

    let flux = |u: f64| 0.25 * u * u;
    let godunov = |ul: f64, ur: f64| -> f64 {
        if ul <= ur {
            if ur <= 0.0 {
                flux(ur)
            } else if ul >= 0.0 {
                flux(ul)
            } else {
                0.0
            }
        } else {
            flux(ul).max(flux(ur))
        }
    };
    let rhs = |v: &[f64]| -> Vec<f64> {
        let n = v.len();
        let val = |j: isize| -> f64 {
            if j < 0 || j >= n as isize {
                0.0
            } else {
                v[j as usize]
            }
        };
        // Unlimited central slopes: the comparison window is strictly
        // pre-shock, so the profile stays smooth and the reconstruction
        // is uniformly second order (a limiter would degrade to first
        // order at the sine extrema).
        let slope = |j: isize| 0.5 * (val(j + 1) - val(j - 1));
        let mut fluxes = vec![0.0; n + 1];
        for f_idx in 0..=n {
            let j = f_idx as isize;
            let ul = val(j - 1) + 0.5 * slope(j - 1);
            let ur = val(j) - 0.5 * slope(j);
            fluxes[f_idx] = godunov(ul, ur);
        }
        (0..n).map(|j| -(fluxes[j + 1] - fluxes[j]) / dx).collect()
    };

    let dt_max = 0.5 * dx;
    let mut out = Vec::with_capacity(times.len());
    let mut cur = 0.0;
    for &target in times {
        let gap = target - cur;
        let n_sub = (gap / dt_max).ceil().max(1.0) as usize;
        let dt = gap / n_sub as f64;
        for _ in 0..n_sub {
            let k1 = rhs(&v);
            let v1: Vec<f64> = v.iter().zip(&k1).map(|(a, b)| a + dt * b).collect();
            let k2 = rhs(&v1);
            v = v
                .iter()
                .zip(v1.iter().zip(&k2))
                .map(|(a, (b, c))| 0.5 * a + 0.5 * (b + dt * c))
                .collect();
        }
        cur = target;
        out.push(v.clone());
    }
    out
}
