use serde::Serialize;

use crate::error::{Error, Result};

use super::matrix::StochasticMatrix;

/// Bounds on single-state transition probabilities between a complementary
/// pair `A`, `B` outside a rare set `U`:
/// `λ1 ≤ p_{b→A} ≤ κ1` for `b ∈ B \ U` and `λ2 ≤ p_{a→B} ≤ κ2` for `a ∈ A \ U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioInputs {
    pub lambda1: f64,
    pub kappa1: f64,
    pub lambda2: f64,
    pub kappa2: f64,
}

/// Interval containing `π(A)/π(B)` given the transition bounds and
/// `π(U∩A)/π(A) ≤ ε`, `π(U∩B)/π(B) ≤ δ`.
pub fn ratio_bounds(p: RatioInputs, epsilon: f64, delta: f64) -> Result<(f64, f64)> {
    for (name, lo, hi) in [("1", p.lambda1, p.kappa1), ("2", p.lambda2, p.kappa2)] {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::invalid(format!("need 0 <= lambda{name} <= kappa{name} <= 1")));
        }
    }
    if !(0.0..1.0).contains(&epsilon) || !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid("epsilon and delta must lie in [0, 1)"));
    }
    let lower_den = (1.0 - epsilon) * p.kappa2 + epsilon;
    let upper_den = (1.0 - epsilon) * p.lambda2;
    if lower_den == 0.0 || upper_den == 0.0 {
        return Err(Error::invalid("ratio bound has a zero denominator"));
    }
    Ok(((1.0 - delta) * p.lambda1 / lower_den, ((1.0 - delta) * p.kappa1 + delta) / upper_den))
}

/// Tightest transition bounds for `A` against its complement, ignoring the
/// states of `u`.
pub fn ratio_inputs(m: &StochasticMatrix<f64>, a: &[usize], u: &[usize]) -> Result<RatioInputs> {
    let n = m.dim();
    let mut in_a = vec![false; n];
    let mut in_u = vec![false; n];
    for &x in a {
        *in_a.get_mut(x).ok_or_else(|| Error::invalid(format!("state {x} out of range")))? = true;
    }
    for &x in u {
        *in_u.get_mut(x).ok_or_else(|| Error::invalid(format!("state {x} out of range")))? = true;
    }
    let into = |x: usize, target: bool| -> f64 { (0..n).filter(|&y| in_a[y] == target).map(|y| m.get(x, y)).sum() };
    let range = |side: bool| -> Result<(f64, f64)> {
        let probs: Vec<f64> = (0..n).filter(|&x| in_a[x] == side && !in_u[x]).map(|x| into(x, !side)).collect();
        if probs.is_empty() {
            return Err(Error::invalid("every state of a block lies in the rare set"));
        }
        Ok((probs.iter().copied().fold(f64::INFINITY, f64::min), probs.iter().copied().fold(0.0, f64::max)))
    };
    let (lambda1, kappa1) = range(false)?;
    let (lambda2, kappa2) = range(true)?;
    Ok(RatioInputs { lambda1, kappa1, lambda2, kappa2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCheck {
    pub mean: f64,
    pub threshold: f64,
    /// Fraction of samples strictly above `λ·mean`.
    pub lhs: f64,
    /// `1/λ`.
    pub bound: f64,
    pub holds: bool,
}

pub fn markov_inequality_check(samples: &[f64], lambda: f64) -> Result<MarkovCheck> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid("lambda must be positive"));
    }
    if let Some(x) = samples.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(Error::invalid(format!("negative sample {x}")));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let threshold = lambda * mean;
    let lhs = samples.iter().filter(|x| **x > threshold).count() as f64 / samples.len() as f64;
    let bound = 1.0 / lambda;
    Ok(MarkovCheck { mean, threshold, lhs, bound, holds: lhs <= bound })
}
