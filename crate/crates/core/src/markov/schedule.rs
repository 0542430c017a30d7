use crate::error::{Error, Result};

use super::matrix::{l1_distance, StochasticMatrix};
use super::stationary::{residual, stationary_distribution};

/// Chooses how to combine the family at each step. The weights may depend
/// on the distributions computed so far, never on a pending draw.
pub trait MatrixSchedule {
    /// Convex weights over the family for the step out of `history.last()`.
    fn weights(&mut self, step: usize, history: &[Vec<f64>], family_size: usize) -> Vec<f64>;
}

impl<F: FnMut(usize, &[Vec<f64>], usize) -> Vec<f64>> MatrixSchedule for F {
    fn weights(&mut self, step: usize, history: &[Vec<f64>], family_size: usize) -> Vec<f64> {
        self(step, history, family_size)
    }
}

fn one_hot(k: usize, len: usize) -> Vec<f64> {
    let mut w = vec![0.0; len];
    w[k] = 1.0;
    w
}

/// Always the same member.
#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub usize);

impl MatrixSchedule for Fixed {
    fn weights(&mut self, _: usize, _: &[Vec<f64>], len: usize) -> Vec<f64> {
        one_hot(self.0, len)
    }
}

/// Members in turn: `step mod |family|`.
#[derive(Debug, Clone, Copy)]
pub struct Cyclic;

impl MatrixSchedule for Cyclic {
    fn weights(&mut self, step: usize, _: &[Vec<f64>], len: usize) -> Vec<f64> {
        one_hot(step % len, len)
    }
}

/// A fixed random choice, which acts through its convex combination.
#[derive(Debug, Clone)]
pub struct Mixture(pub Vec<f64>);

impl MatrixSchedule for Mixture {
    fn weights(&mut self, _: usize, _: &[Vec<f64>], _: usize) -> Vec<f64> {
        self.0.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRun {
    /// Common stationary distribution of the family.
    pub pi: Vec<f64>,
    /// `‖x_t - π‖₁` for `t = 0..=steps`.
    pub distances: Vec<f64>,
}

/// Evolves `x0` under the scheduled family and records the distance to the
/// shared stationary distribution after each step.
pub fn run_matrix_schedule(
    family: &[StochasticMatrix<f64>],
    schedule: &mut dyn MatrixSchedule,
    x0: &[f64],
    steps: usize,
) -> Result<ScheduleRun> {
    let first = family.first().ok_or_else(|| Error::invalid("empty matrix family"))?;
    let n = first.dim();
    if family.iter().any(|m| m.dim() != n) || x0.len() != n {
        return Err(Error::invalid("dimension mismatch in schedule run"));
    }
    let pi = stationary_distribution(first)?.pi;
    for (k, m) in family.iter().enumerate() {
        let r = residual(m, &pi);
        if r > 1e-9 {
            return Err(Error::invalid(format!(
                "family member {k} does not share the stationary distribution (residual {r:e})"
            )));
        }
    }
    let mut history = vec![x0.to_vec()];
    let mut distances = vec![l1_distance(x0, &pi)];
    for step in 0..steps {
        let w = schedule.weights(step, &history, family.len());
        if w.len() != family.len() || w.iter().any(|v| *v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("schedule weights at step {step} are not a convex combination")));
        }
        let x = history.last().expect("history starts with x0");
        let mut next = vec![0.0; n];
        for (m, wk) in family.iter().zip(&w) {
            if *wk > 0.0 {
                for (acc, v) in next.iter_mut().zip(m.left_apply(x)) {
                    *acc += wk * v;
                }
            }
        }
        distances.push(l1_distance(&next, &pi));
        history.push(next);
    }
    Ok(ScheduleRun { pi, distances })
}
