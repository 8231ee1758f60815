//! Symmetric banded matrices and their LDL^T factorization.
//!
//! The spline systems are symmetric positive definite with bandwidth 1
//! (tridiagonal) or 3 (seven diagonals). Factor and solve both run in
//! O(bandwidth^2 * n) arithmetic, which is what keeps the whole
//! derivative-estimation stage linear in the sample count. Multiply-add
//! counts are reported to [`crate::opcount`].

use crate::{opcount, Error, Result};

/// Lower storage of a symmetric banded matrix: `diag[i] = A[i][i]` and
/// `bands[k-1][i] = A[i+k][i]` for offsets `k = 1..=bandwidth`.
#[derive(Debug, Clone)]
pub struct BandedSym {
    n: usize,
    bandwidth: usize,
    diag: Vec<f64>,
    bands: Vec<Vec<f64>>,
}

impl BandedSym {
    /// Zero matrix of order `n` with the given bandwidth.
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bands = (1..=bandwidth)
            .map(|k| vec![0.0; n.saturating_sub(k)])
            .collect();
        Self { n, bandwidth, diag: vec![0.0; n], bands }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry (i, j); zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        let k = hi - lo;
        if k == 0 {
            self.diag[lo]
        } else if k <= self.bandwidth {
            self.bands[k - 1][lo]
        } else {
            0.0
        }
    }

    /// Add `v` to entry (i, j) (and by symmetry (j, i)).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        let k = hi - lo;
        if k == 0 {
            self.diag[lo] += v;
        } else {
            assert!(k <= self.bandwidth, "entry ({i},{j}) outside bandwidth {}", self.bandwidth);
            self.bands[k - 1][lo] += v;
        }
    }

    /// Dense copy, mainly for oracles and diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                a[i][j] = self.get(i, j);
            }
        }
        a
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        let mut ops = 0u64;
        for i in 0..self.n {
            let mut acc = self.diag[i] * x[i];
            ops += 1;
            for k in 1..=self.bandwidth {
                if i >= k {
                    acc += self.bands[k - 1][i - k] * x[i - k];
                    ops += 1;
                }
                if i + k < self.n {
                    acc += self.bands[k - 1][i] * x[i + k];
                    ops += 1;
                }
            }
            y[i] = acc;
        }
        opcount::add(ops);
        y
    }

    /// Factor as L D L^T with unit-lower banded L and positive pivots.
    /// Fails on a nonpositive pivot, which signals a non-SPD input.
    pub fn factor(&self) -> Result<BandLdl> {
        let n = self.n;
        let b = self.bandwidth;
        let mut d = vec![0.0; n];
        let mut low: Vec<Vec<f64>> = (1..=b).map(|k| vec![0.0; n.saturating_sub(k)]).collect();
        let mut ops = 0u64;
        for j in 0..n {
            let mut pivot = self.diag[j];
            let k0 = j.saturating_sub(b);
            for k in k0..j {
                let ljk = low[j - k - 1][k];
                pivot -= ljk * ljk * d[k];
                ops += 2;
            }
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot });
            }
            d[j] = pivot;
            let imax = (j + b).min(n - 1);
            for i in (j + 1)..=imax {
                let mut acc = self.get(i, j);
                let k0 = i.saturating_sub(b);
                for k in k0..j {
                    acc -= low[i - k - 1][k] * low[j - k - 1][k] * d[k];
                    ops += 2;
                }
                low[i - j - 1][j] = acc / pivot;
                ops += 1;
            }
        }
        opcount::add(ops);
        Ok(BandLdl { n, bandwidth: b, diag: d, low })
    }
}

/// Unit-lower banded LDL^T factor. `diag` holds the pivots, `low[k-1][j]`
/// holds `L[j+k][j]`.
#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    bandwidth: usize,
    diag: Vec<f64>,
    low: Vec<Vec<f64>>,
}

impl BandLdl {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn pivots(&self) -> &[f64] {
        &self.diag
    }

    /// Entry L[i][j] of the unit-lower factor.
    pub fn low(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else if i > j && i - j <= self.bandwidth {
            self.low[i - j - 1][j]
        } else {
            0.0
        }
    }

    /// Solve A x = rhs via forward sweep, diagonal scaling and backward
    /// sweep; O(bandwidth * n) arithmetic.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: rhs.len() });
        }
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// In-place variant of [`BandLdl::solve`] for hot loops.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        let b = self.bandwidth;
        let mut ops = 0u64;
        for i in 0..n {
            let k0 = i.saturating_sub(b);
            let mut acc = x[i];
            for k in k0..i {
                acc -= self.low[i - k - 1][k] * x[k];
                ops += 1;
            }
            x[i] = acc;
        }
        for i in 0..n {
            x[i] /= self.diag[i];
            ops += 1;
        }
        for i in (0..n).rev() {
            let kmax = (i + b).min(n - 1);
            let mut acc = x[i];
            for k in (i + 1)..=kmax {
                acc -= self.low[k - i - 1][i] * x[k];
                ops += 1;
            }
            x[i] = acc;
        }
        opcount::add(ops);
    }

    /// Reconstruct L D L^T as a banded matrix (test support).
    pub fn reconstruct(&self) -> BandedSym {
        let mut a = BandedSym::zeros(self.n, self.bandwidth);
        for j in 0..self.n {
            for i in j..(j + self.bandwidth + 1).min(self.n) {
                let mut acc = 0.0;
                let k0 = i.saturating_sub(self.bandwidth);
                for k in k0..=j.min(i) {
                    acc += self.low(i, k) * self.low(j, k) * self.diag[k];
                }
                a.add(i, j, acc);
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_factors_trivially() {
        let mut a = BandedSym::zeros(5, 3);
        for i in 0..5 {
            a.add(i, i, 1.0);
        }
        let f = a.factor().unwrap();
        for p in f.pivots() {
            assert_abs_diff_eq!(*p, 1.0, epsilon = 0.0);
        }
        for i in 0..5 {
            for j in 0..i {
                assert_eq!(f.low(i, j), 0.0);
            }
        }
        let r = f.solve(&[3.0, -1.0, 0.5, 2.0, 7.0]).unwrap();
        assert_eq!(r, vec![3.0, -1.0, 0.5, 2.0, 7.0]);
    }

    #[test]
    fn two_by_two_hand_arithmetic() {
        let mut a = BandedSym::zeros(2, 1);
        a.add(0, 0, 2.0);
        a.add(1, 1, 2.0);
        a.add(1, 0, 1.0);
        let f = a.factor().unwrap();
        assert_abs_diff_eq!(f.pivots()[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.pivots()[1], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.low(1, 0), 0.5, epsilon = 1e-15);
        let x = f.solve(&[3.0, 3.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_spd_is_reported() {
        let mut a = BandedSym::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        a.add(2, 2, 1.0);
        match a.factor() {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected non-SPD error, got {other:?}"),
        }
    }

    #[test]
    fn solve_rejects_wrong_length() {
        let mut a = BandedSym::zeros(3, 1);
        for i in 0..3 {
            a.add(i, i, 2.0);
        }
        let f = a.factor().unwrap();
        assert!(matches!(f.solve(&[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn reconstruction_matches_original() {
        // Diagonally dominant seven-diagonal SPD matrix.
        let n = 24;
        let mut a = BandedSym::zeros(n, 3);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for k in 1..=3usize {
            for i in 0..n - k {
                a.add(i + k, i, next());
            }
        }
        for i in 0..n {
            let row_sum: f64 = (1..=3)
                .map(|k| {
                    let mut s = 0.0;
                    if i >= k {
                        s += a.get(i, i - k).abs();
                    }
                    if i + k < n {
                        s += a.get(i, i + k).abs();
                    }
                    s
                })
                .sum();
            a.add(i, i, row_sum + 1.0 + next().abs());
        }
        let f = a.factor().unwrap();
        let r = f.reconstruct();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = r.get(i, j) - a.get(i, j);
                num += d * d;
                den += a.get(i, j) * a.get(i, j);
            }
        }
        assert!((num / den).sqrt() < 1e-10, "relative Frobenius error too large");
    }
}
