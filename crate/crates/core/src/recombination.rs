//! Crossover operators on populations.
//!
//! `chi(i,x,y)` exchanges the tails (terminals included) of the two rollouts
//! holding `(i,x)` and `(i,y)`; `nu(i,x,y)` exchanges just those two states,
//! also within a single rollout; `swap(i,j)` exchanges rollouts `i` and `j`.
//! Each is an involution. When the states are missing, or for `chi` when
//! they sit in the same rollout, the population is a fixed point.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Letter, Population};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecombOp {
    Identity,
    /// One-point non-homologous crossover. Letters are stored with `x < y`.
    OnePoint { class: u32, x: Letter, y: Letter },
    /// Single position swap. Letters are stored with `x < y`.
    SingleSwap { class: u32, x: Letter, y: Letter },
    /// Exchange of rollouts `i < j`, 1-based.
    Transpose { i: usize, j: usize },
}

fn ordered(x: Letter, y: Letter) -> Result<(Letter, Letter)> {
    match x.cmp(&y) {
        std::cmp::Ordering::Less => Ok((x, y)),
        std::cmp::Ordering::Greater => Ok((y, x)),
        std::cmp::Ordering::Equal => Err(Error::invalid(format!("letters must differ, got {x} twice"))),
    }
}

impl RecombOp {
    pub fn one_point(class: u32, x: Letter, y: Letter) -> Result<Self> {
        let (x, y) = ordered(x, y)?;
        Ok(RecombOp::OnePoint { class, x, y })
    }

    pub fn single_swap(class: u32, x: Letter, y: Letter) -> Result<Self> {
        let (x, y) = ordered(x, y)?;
        Ok(RecombOp::SingleSwap { class, x, y })
    }

    pub fn transpose(i: usize, j: usize) -> Result<Self> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == 0 || i == j {
            return Err(Error::invalid(format!("transposition needs 1 <= i < j, got ({i}, {j})")));
        }
        Ok(RecombOp::Transpose { i, j })
    }

    pub fn apply(&self, pop: &Population) -> Result<Population> {
        let mut out = pop.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, pop: &mut Population) -> Result<()> {
        match self {
            RecombOp::Identity => {}
            RecombOp::OnePoint { class, x, y } => one_point_in_place(pop, *class, x, y),
            RecombOp::SingleSwap { class, x, y } => single_swap_in_place(pop, *class, x, y),
            RecombOp::Transpose { i, j } => {
                let size = pop.size();
                if *j > size || *i == 0 || i >= j {
                    return Err(Error::IndexOutOfRange { i: *i, j: *j, size });
                }
                pop.rollouts_mut().swap(i - 1, j - 1);
            }
        }
        Ok(())
    }
}

fn one_point_in_place(pop: &mut Population, class: u32, x: &Letter, y: &Letter) {
    let (Some((r1, p1)), Some((r2, p2))) = (pop.locate(class, x), pop.locate(class, y)) else {
        return;
    };
    if r1 == r2 {
        return;
    }
    let rollouts = pop.rollouts_mut();
    let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let (pl, ph) = if r1 < r2 { (p1, p2) } else { (p2, p1) };
    let (left, right) = rollouts.split_at_mut(hi);
    let a = &mut left[lo];
    let b = &mut right[0];
    let tail_a = a.states.split_off(pl);
    let tail_b = b.states.split_off(ph);
    a.states.extend(tail_b);
    b.states.extend(tail_a);
    std::mem::swap(&mut a.terminal, &mut b.terminal);
}

fn single_swap_in_place(pop: &mut Population, class: u32, x: &Letter, y: &Letter) {
    let (Some((r1, p1)), Some((r2, p2))) = (pop.locate(class, x), pop.locate(class, y)) else {
        return;
    };
    let rollouts = pop.rollouts_mut();
    rollouts[r1].states[p1].letter = y.clone();
    rollouts[r2].states[p2].letter = x.clone();
}

impl fmt::Display for RecombOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecombOp::Identity => f.write_str("id"),
            RecombOp::OnePoint { class, x, y } => write!(f, "chi({class},{x},{y})"),
            RecombOp::SingleSwap { class, x, y } => write!(f, "nu({class},{x},{y})"),
            RecombOp::Transpose { i, j } => write!(f, "swap({i},{j})"),
        }
    }
}

/// Ops applied left to right: the first listed acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformationSequence(Vec<RecombOp>);

impl TransformationSequence {
    pub fn new(ops: Vec<RecombOp>) -> Self {
        TransformationSequence(ops)
    }

    pub fn ops(&self) -> &[RecombOp] {
        &self.0
    }

    pub fn push(&mut self, op: RecombOp) {
        self.0.push(op);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, pop: &Population) -> Result<Population> {
        let mut out = pop.clone();
        for op in &self.0 {
            op.apply_in_place(&mut out)?;
        }
        Ok(out)
    }
}

impl fmt::Display for TransformationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, op) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

impl FromIterator<RecombOp> for TransformationSequence {
    fn from_iter<T: IntoIterator<Item = RecombOp>>(iter: T) -> Self {
        TransformationSequence(iter.into_iter().collect())
    }
}

pub fn apply_one_point(pop: &Population, class: u32, x: &Letter, y: &Letter) -> Population {
    let mut out = pop.clone();
    one_point_in_place(&mut out, class, x, y);
    out
}

pub fn apply_single_swap(pop: &Population, class: u32, x: &Letter, y: &Letter) -> Population {
    let mut out = pop.clone();
    single_swap_in_place(&mut out, class, x, y);
    out
}

/// Exchange rollouts `i < j` (1-based).
pub fn apply_transposition(pop: &Population, i: usize, j: usize) -> Result<Population> {
    if i == 0 || i >= j || j > pop.size() {
        return Err(Error::IndexOutOfRange { i, j, size: pop.size() });
    }
    let mut rollouts = pop.rollouts().to_vec();
    rollouts.swap(i - 1, j - 1);
    Ok(Population::from_valid(rollouts))
}

pub fn apply_sequence(pop: &Population, seq: &TransformationSequence) -> Result<Population> {
    seq.apply(pop)
}

/// Generators realizable in `pop`, in canonical order: the identity, then
/// for each class ascending and each letter pair `x < y` the pair
/// `chi(i,x,y)`, `nu(i,x,y)`, then optionally every `swap(i,j)`.
///
/// Ops on states absent from `pop` fix its whole orbit, so they are left
/// out. The set is the same for every member of the orbit.
pub fn enumerate_generators(pop: &Population, include_transpositions: bool) -> Vec<RecombOp> {
    let mut ops = vec![RecombOp::Identity];
    for (class, letters) in pop.letters_by_class() {
        let letters: Vec<_> = letters.into_iter().collect();
        for (k, x) in letters.iter().enumerate() {
            for y in &letters[k + 1..] {
                ops.push(RecombOp::OnePoint { class, x: x.clone(), y: y.clone() });
                ops.push(RecombOp::SingleSwap { class, x: x.clone(), y: y.clone() });
            }
        }
    }
    if include_transpositions {
        let b = pop.size();
        for i in 1..=b {
            for j in i + 1..=b {
                ops.push(RecombOp::Transpose { i, j });
            }
        }
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_population;

    fn p0() -> Population {
        parse_population("alpha: 1/a -> f1\nbeta: 1/b -> f2").unwrap()
    }

    #[test]
    fn transposition() {
        let p = p0();
        let t = apply_transposition(&p, 1, 2).unwrap();
        assert_eq!(t, parse_population("beta: 1/b -> f2\nalpha: 1/a -> f1").unwrap());
        assert_eq!(apply_transposition(&t, 1, 2).unwrap(), p);
        assert!(matches!(apply_transposition(&p, 1, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(RecombOp::Transpose { i: 1, j: 3 }.apply(&p).is_err());
    }

    #[test]
    fn chi_on_height_one_moves_terminals() {
        let p = p0();
        let q = apply_one_point(&p, 1, &Letter::new("a"), &Letter::new("b"));
        assert_eq!(q, parse_population("alpha: 1/b -> f2\nbeta: 1/a -> f1").unwrap());
        let q = apply_single_swap(&p, 1, &Letter::new("a"), &Letter::new("b"));
        assert_eq!(q, parse_population("alpha: 1/b -> f1\nbeta: 1/a -> f2").unwrap());
    }

    #[test]
    fn nu_within_one_rollout() {
        let p = parse_population("alpha: 1/a, 2/a, 1/b -> f1").unwrap();
        let q = apply_single_swap(&p, 1, &Letter::new("b"), &Letter::new("a"));
        assert_eq!(q, parse_population("alpha: 1/b, 2/a, 1/a -> f1").unwrap());
        let q = apply_one_point(&p, 1, &Letter::new("a"), &Letter::new("b"));
        assert_eq!(q, p);
    }

    #[test]
    fn generators_of_p0() {
        let ops = enumerate_generators(&p0(), false);
        let text: Vec<_> = ops.iter().map(|o| o.to_string()).collect();
        assert_eq!(text, ["id", "chi(1,a,b)", "nu(1,a,b)"]);
        assert_eq!(enumerate_generators(&p0(), true).len(), 4);
    }

    #[test]
    fn single_rollout_distinct_classes_has_only_identity() {
        let p = parse_population("alpha: 1/a, 2/a, 3/a -> f").unwrap();
        assert_eq!(enumerate_generators(&p, false), vec![RecombOp::Identity]);
    }

    #[test]
    fn empty_sequence_is_identity() {
        let p = p0();
        assert_eq!(apply_sequence(&p, &TransformationSequence::default()).unwrap(), p);
    }
}
