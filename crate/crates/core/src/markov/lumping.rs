use crate::error::{Error, Result};

use super::matrix::{BlockPartition, StochasticMatrix};
use super::scalar::Scalar;
use super::stationary::residual;

const STATIONARY_TOLERANCE: f64 = 1e-9;

fn check_stationary<T: Scalar>(m: &StochasticMatrix<T>, pi: &[T]) -> Result<()> {
    if pi.len() != m.dim() {
        return Err(Error::invalid(format!("vector has {} entries for a {}-state chain", pi.len(), m.dim())));
    }
    let r = residual(m, pi);
    if r > STATIONARY_TOLERANCE {
        return Err(Error::NotStationary { residual: r });
    }
    Ok(())
}

fn mass<T: Scalar>(pi: &[T], set: &[usize]) -> T {
    set.iter().fold(T::zero(), |acc, &x| acc + pi[x].clone())
}

/// Quotient chain on the blocks, each block weighted by `pi`.
pub fn lump_quotient<T: Scalar>(
    m: &StochasticMatrix<T>,
    pi: &[T],
    partition: &BlockPartition,
) -> Result<StochasticMatrix<T>> {
    check_stationary(m, pi)?;
    if partition.states() != m.dim() {
        return Err(Error::invalid("partition does not cover the state space"));
    }
    if let Some(x) = pi.iter().position(|v| *v <= T::zero()) {
        return Err(Error::ZeroStationaryMass(x));
    }
    let k = partition.block_count();
    let weights = partition.block_sums(pi);
    let mut data = vec![T::zero(); k * k];
    for (x, px) in pi.iter().enumerate() {
        let u = partition.block_of(x);
        for (y, p) in m.row(x).iter().enumerate() {
            if !p.is_zero() {
                let v = partition.block_of(y);
                data[u * k + v] = data[u * k + v].clone() + px.clone() * p.clone();
            }
        }
    }
    for u in 0..k {
        for v in 0..k {
            data[u * k + v] = data[u * k + v].clone() / weights[u].clone();
        }
    }
    Ok(StochasticMatrix::from_flat(k, data))
}

/// `p_{A→B} = Σ_{a∈A} π(a)/π(A) · p_{a→B}`.
pub fn generalized_transition<T: Scalar>(m: &StochasticMatrix<T>, pi: &[T], a: &[usize], b: &[usize]) -> Result<T> {
    if a.is_empty() {
        return Err(Error::invalid("source set is empty"));
    }
    if let Some(&x) = a.iter().chain(b).find(|&&x| x >= m.dim()) {
        return Err(Error::invalid(format!("state {x} out of range")));
    }
    let weight = mass(pi, a);
    if weight <= T::zero() {
        return Err(Error::invalid("source set has zero stationary mass"));
    }
    let mut acc = T::zero();
    for &x in a {
        let to_b = b.iter().fold(T::zero(), |s, &y| s + m.get(x, y).clone());
        acc = acc + pi[x].clone() * to_b;
    }
    Ok(acc / weight)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlockRatio<T> {
    /// `p_{A^c→A} / p_{A→A^c}`.
    pub ratio: T,
    /// `π(A) / π(A^c)`.
    pub stationary_ratio: T,
}

/// Ratio of the two cross-block transition probabilities, checked against
/// the ratio of stationary masses.
pub fn two_block_ratio<T: Scalar>(m: &StochasticMatrix<T>, pi: &[T], a: &[usize]) -> Result<TwoBlockRatio<T>> {
    check_stationary(m, pi)?;
    let n = m.dim();
    let mut in_a = vec![false; n];
    for &x in a {
        *in_a.get_mut(x).ok_or_else(|| Error::invalid(format!("state {x} out of range")))? = true;
    }
    let complement: Vec<usize> = (0..n).filter(|&x| !in_a[x]).collect();
    let a: Vec<usize> = (0..n).filter(|&x| in_a[x]).collect();
    if a.is_empty() || complement.is_empty() {
        return Err(Error::invalid("both A and its complement must be non-empty"));
    }
    let out = generalized_transition(m, pi, &a, &complement)?;
    if out.is_zero() {
        return Err(Error::invalid("block A is absorbing: p(A -> A^c) = 0"));
    }
    let back = generalized_transition(m, pi, &complement, &a)?;
    let ratio = back / out;
    let stationary_ratio = mass(pi, &a) / mass(pi, &complement);
    let gap = (ratio.clone() - stationary_ratio.clone()).abs().to_f64_lossy();
    if gap > STATIONARY_TOLERANCE {
        return Err(Error::NotStationary { residual: gap });
    }
    Ok(TwoBlockRatio { ratio, stationary_ratio })
}
