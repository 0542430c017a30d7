//! States, rollouts and populations.
//!
//! A state is written as an equivalence class paired with a letter, `3/d`.
//! Inflated populations carry a copy index on letters and terminals
//! (`3/d.2`, `f1.2`), so an inflation is an ordinary [`Population`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Interned, cheaply clonable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Symbol {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Letter of a state: a base symbol plus the copy index added by inflation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub base: Symbol,
    pub copy: Option<u32>,
}

impl Letter {
    pub fn new(base: &str) -> Self {
        Letter { base: Symbol::new(base), copy: None }
    }

    pub fn with_copy(base: &str, copy: u32) -> Self {
        Letter { base: Symbol::new(base), copy: Some(copy) }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.copy {
            Some(k) => write!(f, "{}.{}", self.base, k),
            None => write!(f, "{}", self.base),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateLabel {
    pub class: u32,
    pub letter: Letter,
}

impl StateLabel {
    pub fn new(class: u32, letter: Letter) -> Self {
        StateLabel { class, letter }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.class, self.letter)
    }
}

impl fmt::Debug for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TerminalLabel {
    pub name: Symbol,
    pub copy: Option<u32>,
}

impl TerminalLabel {
    pub fn new(name: &str) -> Self {
        TerminalLabel { name: Symbol::new(name), copy: None }
    }

    pub fn with_copy(name: &str, copy: u32) -> Self {
        TerminalLabel { name: Symbol::new(name), copy: Some(copy) }
    }
}

impl fmt::Display for TerminalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.copy {
            Some(k) => write!(f, "{}.{}", self.name, k),
            None => write!(f, "{}", self.name),
        }
    }
}

impl fmt::Debug for TerminalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One simulated trajectory: the evaluated action, the visited states and
/// the terminal label.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rollout {
    pub action: Symbol,
    pub states: Vec<StateLabel>,
    pub terminal: TerminalLabel,
}

impl Rollout {
    pub fn new(action: &str, states: Vec<StateLabel>, terminal: TerminalLabel) -> Self {
        Rollout { action: Symbol::new(action), states, terminal }
    }

    pub fn height(&self) -> usize {
        self.states.len()
    }

    pub fn classes(&self) -> impl Iterator<Item = u32> + '_ {
        self.states.iter().map(|s| s.class)
    }
}

impl fmt::Display for Rollout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.action)?;
        for (k, s) in self.states.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, " -> {}", self.terminal)
    }
}

impl fmt::Debug for Rollout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Ordered population of rollouts at a chance node.
///
/// Every state label and every terminal label is unique across the whole
/// population, each rollout has at least one state, and there is at least
/// one rollout. These invariants are checked on construction and preserved
/// by every recombination operator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Population {
    rollouts: Vec<Rollout>,
}

impl Population {
    pub fn new(rollouts: Vec<Rollout>) -> Result<Self> {
        validate(&rollouts, |i| i + 1)?;
        Ok(Population { rollouts })
    }

    /// Validation with caller-supplied line numbers for error messages.
    pub(crate) fn with_lines(rollouts: Vec<Rollout>, lines: &[usize]) -> Result<Self> {
        validate(&rollouts, |i| lines[i])?;
        Ok(Population { rollouts })
    }

    /// Skips validation; only for results of invariant-preserving operations.
    pub(crate) fn from_valid(rollouts: Vec<Rollout>) -> Self {
        Population { rollouts }
    }

    pub fn rollouts(&self) -> &[Rollout] {
        &self.rollouts
    }

    pub(crate) fn rollouts_mut(&mut self) -> &mut [Rollout] {
        &mut self.rollouts
    }

    pub fn into_rollouts(self) -> Vec<Rollout> {
        self.rollouts
    }

    /// Population size `b`.
    pub fn size(&self) -> usize {
        self.rollouts.len()
    }

    pub fn heights(&self) -> Vec<usize> {
        self.rollouts.iter().map(Rollout::height).collect()
    }

    /// Height of the `i`-th rollout, 1-based.
    pub fn height(&self, i: usize) -> Option<usize> {
        i.checked_sub(1).and_then(|k| self.rollouts.get(k)).map(Rollout::height)
    }

    pub fn total_states(&self) -> usize {
        self.rollouts.iter().map(Rollout::height).sum()
    }

    /// Equal classes never occur at different depths.
    pub fn is_homologous(&self) -> bool {
        let mut depth: BTreeMap<u32, usize> = BTreeMap::new();
        for r in &self.rollouts {
            for (pos, s) in r.states.iter().enumerate() {
                if *depth.entry(s.class).or_insert(pos) != pos {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_inflated(&self) -> bool {
        self.rollouts.iter().any(|r| {
            r.terminal.copy.is_some() || r.states.iter().any(|s| s.letter.copy.is_some())
        })
    }

    /// Largest copy index present, i.e. the inflation factor (1 if none).
    pub fn inflation_factor(&self) -> u32 {
        self.rollouts
            .iter()
            .flat_map(|r| {
                r.states.iter().filter_map(|s| s.letter.copy).chain(r.terminal.copy)
            })
            .max()
            .unwrap_or(1)
    }

    /// Classes present, each with its letters in sorted order.
    pub fn letters_by_class(&self) -> BTreeMap<u32, BTreeSet<Letter>> {
        let mut out: BTreeMap<u32, BTreeSet<Letter>> = BTreeMap::new();
        for r in &self.rollouts {
            for s in &r.states {
                out.entry(s.class).or_default().insert(s.letter.clone());
            }
        }
        out
    }

    /// (rollout index, position) of a state, both 0-based.
    pub fn locate(&self, class: u32, letter: &Letter) -> Option<(usize, usize)> {
        self.rollouts.iter().enumerate().find_map(|(ri, r)| {
            r.states
                .iter()
                .position(|s| s.class == class && s.letter == *letter)
                .map(|p| (ri, p))
        })
    }

    pub fn metrics(&self) -> PopulationMetrics {
        PopulationMetrics {
            size: self.size(),
            heights: self.heights(),
            total_states: self.total_states(),
            is_homologous: self.is_homologous(),
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rollouts {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rollouts).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PopulationMetrics {
    #[serde(rename = "b")]
    pub size: usize,
    pub heights: Vec<usize>,
    #[serde(rename = "total")]
    pub total_states: usize,
    #[serde(rename = "homologous")]
    pub is_homologous: bool,
}

fn validate(rollouts: &[Rollout], line_of: impl Fn(usize) -> usize) -> Result<()> {
    if rollouts.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut states = HashSet::new();
    let mut terminals = HashSet::new();
    for (i, r) in rollouts.iter().enumerate() {
        if r.states.is_empty() {
            return Err(Error::EmptyRollout { line: line_of(i) });
        }
        for s in &r.states {
            if s.class == 0 {
                return Err(Error::invalid(format!("class of {s} must be at least 1")));
            }
            if s.letter.copy == Some(0) {
                return Err(Error::invalid(format!("copy index of {s} must be at least 1")));
            }
            if !states.insert(s) {
                return Err(Error::DuplicateState { label: s.to_string(), line: line_of(i) });
            }
        }
        if r.terminal.name.is_empty() {
            return Err(Error::invalid("empty terminal name"));
        }
        if r.terminal.copy == Some(0) {
            return Err(Error::invalid(format!("copy index of {} must be at least 1", r.terminal)));
        }
        if !terminals.insert(&r.terminal) {
            return Err(Error::DuplicateTerminal {
                label: r.terminal.to_string(),
                line: line_of(i),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(class: u32, l: &str) -> StateLabel {
        StateLabel::new(class, Letter::new(l))
    }

    #[test]
    fn rejects_duplicate_state_across_rollouts() {
        let err = Population::new(vec![
            Rollout::new("alpha", vec![st(1, "a")], TerminalLabel::new("f1")),
            Rollout::new("beta", vec![st(1, "a")], TerminalLabel::new("f2")),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateState { line: 2, .. }));
    }

    #[test]
    fn rejects_duplicate_terminal() {
        let err = Population::new(vec![
            Rollout::new("alpha", vec![st(1, "a")], TerminalLabel::new("f1")),
            Rollout::new("beta", vec![st(1, "b")], TerminalLabel::new("f1")),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateTerminal { .. }));
    }

    #[test]
    fn rejects_empty_inputs() {
        assert!(matches!(Population::new(vec![]), Err(Error::EmptyPopulation)));
        let err = Population::new(vec![Rollout::new("a", vec![], TerminalLabel::new("f"))]);
        assert!(matches!(err, Err(Error::EmptyRollout { line: 1 })));
    }

    #[test]
    fn homology_is_by_depth() {
        let p0 = Population::new(vec![
            Rollout::new("alpha", vec![st(1, "a")], TerminalLabel::new("f1")),
            Rollout::new("beta", vec![st(1, "b")], TerminalLabel::new("f2")),
        ])
        .unwrap();
        assert!(p0.is_homologous());
        let p1 = Population::new(vec![
            Rollout::new("alpha", vec![st(1, "a"), st(2, "a")], TerminalLabel::new("f1")),
            Rollout::new("beta", vec![st(2, "b"), st(1, "b")], TerminalLabel::new("f2")),
        ])
        .unwrap();
        assert!(!p1.is_homologous());
        assert_eq!(p1.height(2), Some(2));
        assert_eq!(p1.height(3), None);
    }
}
