use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::linalg::solve;
use super::matrix::{l1_distance, StochasticMatrix};
use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Stationary<T> {
    pub pi: Vec<T>,
    /// Every state reaches every other.
    pub irreducible: bool,
    /// Exactly one closed communicating class, so `pi` is the only
    /// stationary distribution.
    pub unique: bool,
    /// `‖pi M - pi‖₁`.
    pub residual: f64,
}

/// `reach[x][y]`: `y` can be reached from `x` in zero or more steps.
pub fn reachability<T: Scalar>(m: &StochasticMatrix<T>) -> Vec<Vec<bool>> {
    let n = m.dim();
    let succ: Vec<Vec<usize>> =
        (0..n).map(|x| (0..n).filter(|&y| *m.get(x, y) > T::zero()).collect()).collect();
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &succ[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn is_irreducible<T: Scalar>(m: &StochasticMatrix<T>) -> bool {
    reachability(m).iter().all(|row| row.iter().all(|&r| r))
}

/// Closed communicating classes, each sorted, ordered by smallest member.
pub fn closed_classes<T: Scalar>(m: &StochasticMatrix<T>) -> Vec<Vec<usize>> {
    let reach = reachability(m);
    let n = m.dim();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if assigned[x] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&y| reach[x][y] && reach[y][x]).collect();
        for &y in &class {
            assigned[y] = true;
        }
        let closed = (0..n).all(|y| !reach[x][y] || reach[y][x]);
        if closed {
            out.push(class);
        }
    }
    out
}

pub fn residual<T: Scalar>(m: &StochasticMatrix<T>, pi: &[T]) -> f64 {
    l1_distance(&m.left_apply(pi), pi)
}

/// Stationary distribution by a direct solve on the first closed class,
/// zero elsewhere.
pub fn stationary_distribution<T: Scalar>(m: &StochasticMatrix<T>) -> Result<Stationary<T>> {
    let n = m.dim();
    let closed = closed_classes(m);
    let class = &closed[0];
    let k = class.len();

    // pi_C (M_C - I) = 0 with the last equation replaced by sum(pi_C) = 1.
    let mut a = vec![vec![T::zero(); k]; k];
    for (row, &y) in class.iter().enumerate() {
        for (col, &x) in class.iter().enumerate() {
            let mut v = m.get(x, y).clone();
            if x == y {
                v = v - T::one();
            }
            a[row][col] = v;
        }
    }
    a[k - 1] = vec![T::one(); k];
    let mut rhs = vec![T::zero(); k];
    rhs[k - 1] = T::one();
    let sol = solve(a, rhs)?;

    let mut pi = vec![T::zero(); n];
    for (&x, v) in class.iter().zip(sol) {
        // round-off can leave tiny negatives
        pi[x] = if v < T::zero() { T::zero() } else { v };
    }
    let res = residual(m, &pi);
    Ok(Stationary { pi, irreducible: k == n, unique: closed.len() == 1, residual: res })
}

/// Iterates `x ← x M` until successive iterates are within `tol` in L1.
pub fn power_iterate(
    m: &StochasticMatrix<f64>,
    x0: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut x = x0.to_vec();
    for it in 1..=max_iterations {
        let next = m.left_apply(&x);
        let delta = l1_distance(&next, &x);
        x = next;
        if delta < tol {
            return Ok((x, it));
        }
    }
    Err(Error::NoConvergence { iterations: max_iterations })
}
