//! Candidate PDE terms: products of powers of spatial derivatives.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// One factor of a term: the `order`-th spatial derivative of u raised
/// to `power`. Order 0 is u itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub order: usize,
    pub power: usize,
}

/// A dictionary column label: an ordered product of [`Factor`]s, with
/// the empty product denoting the intercept.
///
/// Labels render as `1`, `u`, `u_x^2`, `u*u_x`, `u_x*u_xx` and so on:
/// factors joined by `*`, each written `u` for order 0 or `u_`
/// followed by `order` letters `x`, with `^power` appended when the
/// power exceeds one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermLabel {
    factors: Vec<Factor>,
}

impl TermLabel {
    /// Intercept label (empty product).
    pub fn intercept() -> Self {
        Self { factors: Vec::new() }
    }

    /// Build a label from `(derivative order, power)` pairs. Orders
    /// must be strictly increasing, powers at least one, and at most
    /// two distinct orders may appear (the model class has pure powers
    /// and pairwise products only).
    pub fn new(factors: Vec<(usize, usize)>) -> Result<Self> {
        if factors.len() > 2 {
            return Err(Error::InvalidParam(format!(
                "a term may hold at most two factors, got {}",
                factors.len()
            )));
        }
        for w in factors.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParam(
                    "factor derivative orders must be strictly increasing".into(),
                ));
            }
        }
        if factors.iter().any(|&(_, p)| p == 0) {
            return Err(Error::InvalidParam("factor powers must be at least 1".into()));
        }
        Ok(Self {
            factors: factors
                .into_iter()
                .map(|(order, power)| Factor { order, power })
                .collect(),
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_intercept(&self) -> bool {
        self.factors.is_empty()
    }

    /// Sum of factor powers (0 for the intercept).
    pub fn total_power(&self) -> usize {
        self.factors.iter().map(|f| f.power).sum()
    }

    /// Highest derivative order appearing in the label.
    pub fn max_order(&self) -> usize {
        self.factors.iter().map(|f| f.order).max().unwrap_or(0)
    }
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for factor in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if factor.order == 0 {
                write!(f, "u")?;
            } else {
                write!(f, "u_{}", "x".repeat(factor.order))?;
            }
            if factor.power > 1 {
                write!(f, "^{}", factor.power)?;
            }
        }
        Ok(())
    }
}

impl FromStr for TermLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::intercept());
        }
        let mut factors = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            let (base, power) = match part.split_once('^') {
                Some((b, p)) => {
                    let power: usize = p
                        .parse()
                        .map_err(|_| Error::InvalidParam(format!("bad power in term '{s}'")))?;
                    (b, power)
                }
                None => (part, 1),
            };
            let order = if base == "u" {
                0
            } else if let Some(xs) = base.strip_prefix("u_") {
                if xs.is_empty() || xs.chars().any(|c| c != 'x') {
                    return Err(Error::InvalidParam(format!("bad factor '{base}' in term '{s}'")));
                }
                xs.len()
            } else {
                return Err(Error::InvalidParam(format!("bad factor '{base}' in term '{s}'")));
            };
            factors.push((order, power));
        }
        TermLabel::new(factors)
    }
}

/// Enumerate the candidate terms for a model with polynomial order up
/// to `p_max` and derivative order up to `q_max`, in the canonical
/// order: intercept; pure powers grouped by derivative order k = 0..
/// q_max with powers 1..p_max; then cross products over ordered pairs
/// k < l with powers i, j >= 1 and i + j <= p_max, lexicographic in
/// (k, l, i, j). The returned length defines the dictionary width K.
pub fn enumerate_terms(p_max: usize, q_max: usize) -> Result<Vec<TermLabel>> {
    if p_max < 1 {
        return Err(Error::InvalidParam(format!("p_max must be at least 1, got {p_max}")));
    }
    let mut labels = vec![TermLabel::intercept()];
    for k in 0..=q_max {
        for i in 1..=p_max {
            labels.push(TermLabel::new(vec![(k, i)])?);
        }
    }
    for k in 0..q_max {
        for l in (k + 1)..=q_max {
            for i in 1..p_max {
                for j in 1..=(p_max - i) {
                    labels.push(TermLabel::new(vec![(k, i), (l, j)])?);
                }
            }
        }
    }
    Ok(labels)
}
