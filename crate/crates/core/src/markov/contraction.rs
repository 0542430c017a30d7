use std::collections::HashSet;

use super::matrix::{l1_distance, StochasticMatrix};
use super::scalar::Scalar;

/// `max(0, 1 - n·β)` with `β` the smallest entry: one step shrinks the L1
/// distance between any two distributions by at least this factor.
pub fn contraction_rate_bound<T: Scalar>(m: &StochasticMatrix<T>) -> T {
    let rate = T::one() - T::of_count(m.dim()) * m.min_entry();
    if rate < T::zero() {
        T::zero()
    } else {
        rate
    }
}

/// `‖(u - v) M‖₁ / ‖u - v‖₁`, or 0 when `u = v`.
pub fn contraction_ratio(m: &StochasticMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let before = l1_distance(u, v);
    if before == 0.0 {
        return 0.0;
    }
    l1_distance(&m.left_apply(u), &m.left_apply(v)) / before
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Pattern {
    n: usize,
    bits: Vec<bool>,
}

impl Pattern {
    fn then(&self, other: &Pattern) -> Pattern {
        let n = self.n;
        let mut bits = vec![false; n * n];
        for x in 0..n {
            for k in 0..n {
                if self.bits[x * n + k] {
                    for y in 0..n {
                        bits[x * n + y] |= other.bits[k * n + y];
                    }
                }
            }
        }
        Pattern { n, bits }
    }

    fn all_positive(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

/// Smallest `k ≤ k_max` such that every product of `k` family members is
/// entrywise positive.
///
/// Only positivity patterns matter, so the products are tracked as a set of
/// boolean matrices rather than enumerated.
pub fn common_reachable_index<T: Scalar>(family: &[StochasticMatrix<T>], k_max: usize) -> Option<usize> {
    let first = family.first()?;
    let n = first.dim();
    let base: Vec<Pattern> = family
        .iter()
        .map(|m| Pattern { n, bits: m.support() })
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let mut current: HashSet<Pattern> = base.iter().cloned().collect();
    for k in 1..=k_max {
        if current.iter().all(Pattern::all_positive) {
            return Some(k);
        }
        current = current.iter().flat_map(|s| base.iter().map(move |p| s.then(p))).collect();
    }
    None
}

/// Largest contraction bound over all products of `k` family members; the
/// distance after `t` steps of any schedule is at most this to the power
/// `⌊t/k⌋` times the initial distance.
pub fn composed_contraction_rate(family: &[StochasticMatrix<f64>], k: usize) -> f64 {
    let mut products: Vec<StochasticMatrix<f64>> = vec![StochasticMatrix::identity(family[0].dim())];
    for _ in 0..k {
        products = products.iter().flat_map(|p| family.iter().map(move |m| p.then(m))).collect();
    }
    products.iter().map(contraction_rate_bound).fold(0.0, f64::max)
}
