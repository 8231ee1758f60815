//! Support-recovery diagnostics for an identified support set.
//!
//! Computable counterparts of the sufficient conditions for correct
//! sparse recovery: invertibility of the support Gram matrix, the
//! mutual-incoherence bound `||X_Sc^T X_S (X_S^T X_S)^-1||_inf < 1`,
//! and the minimal eigenvalue of `X_S^T X_S / MN`. All three are
//! evaluated on the raw (unscaled) dictionary columns.

use crate::dictionary::Dictionary;
use crate::{Error, Result};

/// Diagnostic summary for one support set.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Whether X_S^T X_S is numerically invertible.
    pub invertible: bool,
    /// Max absolute row sum of X_Sc^T X_S (X_S^T X_S)^-1; unset when
    /// the support Gram matrix is singular.
    pub incoherence: Option<f64>,
    /// Smallest eigenvalue of X_S^T X_S / MN; unset when singular.
    pub min_eigenvalue: Option<f64>,
}

/// Evaluate the diagnostics for a nonempty support with |S| < K.
pub fn diagnose_conditions(dict: &Dictionary, support: &[usize]) -> Result<ConditionReport> {
    let k = dict.k();
    if support.is_empty() {
        return Err(Error::InvalidParam("support must be nonempty".into()));
    }
    if support.len() >= k {
        return Err(Error::InvalidParam(format!(
            "support size {} must be smaller than the dictionary width {k}",
            support.len()
        )));
    }
    if support.iter().any(|&j| j >= k) {
        return Err(Error::InvalidParam("support index out of range".into()));
    }
    let s = support.len();
    let complement: Vec<usize> = (0..k).filter(|j| !support.contains(j)).collect();

    let gram_ss =
        |r: usize, c: usize| -> f64 { dict.gram_raw(support[r], support[c]) };
    let mut a = vec![vec![0.0; s]; s];
    for r in 0..s {
        for c in 0..s {
            a[r][c] = gram_ss(r, c);
        }
    }

    // Row j of X_Sc^T X_S (X_S^T X_S)^-1 solves G_SS v = X_S^T X_j.
    let mut incoherence = 0.0_f64;
    for &j in &complement {
        let rhs: Vec<f64> = support.iter().map(|&sj| dict.gram_raw(j, sj)).collect();
        match crate::dense::solve(a.clone(), rhs) {
            Ok(v) => {
                let row_sum: f64 = v.iter().map(|x| x.abs()).sum();
                incoherence = incoherence.max(row_sum);
            }
            Err(()) => {
                return Ok(ConditionReport {
                    invertible: false,
                    incoherence: None,
                    min_eigenvalue: None,
                });
            }
        }
    }

    let mn = dict.rows() as f64;
    let scaled: Vec<Vec<f64>> = (0..s)
        .map(|r| (0..s).map(|c| gram_ss(r, c) / mn).collect())
        .collect();
    let min_eigenvalue = crate::dense::sym_eigen_min(scaled);

    Ok(ConditionReport {
        invertible: true,
        incoherence: Some(incoherence),
        min_eigenvalue: Some(min_eigenvalue),
    })
}
