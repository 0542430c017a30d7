//! Exact enumeration of the orbit `[P]` of a population under the
//! generators, and exact long-run frequencies over it.
//!
//! Populations are stored as flat `u32` keys: per rollout the action id,
//! the number of states, the state ids and the terminal id. Ids index the
//! labels of the starting population, which every orbit member shares.
//!
//! `nu(i,x,y)` only renames letters `x` and `y` of class `i`, so the orbit
//! is closed under renaming letters within a class. Forgetting letters
//! leaves the rollout "shapes" (action, class sequence, terminal); every
//! shape in the orbit carries the same number `Π_i n_i!` of labelings, where
//! `n_i` is the number of letters of class `i`. [`ShapeOrbit`] enumerates the
//! shapes only, which is what makes larger inflations tractable, and gives
//! the same frequencies as the full orbit.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::markov::StochasticMatrix;
use crate::mixing::MixingDistribution;
use crate::model::{Population, Rollout, StateLabel, Symbol, TerminalLabel};
use crate::recombination::{enumerate_generators, RecombOp};
use crate::schema::{Schema, Tail};
use crate::Rational;

pub const DEFAULT_CAP: usize = 200_000;

/// Largest orbit for which a dense transition matrix is built.
pub const DENSE_LIMIT: usize = 4096;

type Key = Box<[u32]>;

/// Start offset and state count of each rollout in a key.
fn spans(key: &[u32]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut at = 0;
    while at < key.len() {
        let n = key[at + 1] as usize;
        out.push((at, n));
        at += n + 3;
    }
    out
}

fn push_rollout(out: &mut Vec<u32>, action: u32, head: &[u32], tail: &[u32], terminal: u32) {
    out.push(action);
    out.push((head.len() + tail.len()) as u32);
    out.extend_from_slice(head);
    out.extend_from_slice(tail);
    out.push(terminal);
}

/// Exchange the tails starting at state offset `pa` of rollout `ra` and
/// offset `pb` of rollout `rb`, terminals included.
fn swap_tails(key: &[u32], sp: &[(usize, usize)], (ra, pa): (usize, usize), (rb, pb): (usize, usize)) -> Key {
    let mut out = Vec::with_capacity(key.len());
    let states = |r: usize| &key[sp[r].0 + 2..sp[r].0 + 2 + sp[r].1];
    let term = |r: usize| key[sp[r].0 + 2 + sp[r].1];
    for (r, &(start, n)) in sp.iter().enumerate() {
        if r == ra {
            push_rollout(&mut out, key[start], &states(ra)[..pa], &states(rb)[pb..], term(rb));
        } else if r == rb {
            push_rollout(&mut out, key[start], &states(rb)[..pb], &states(ra)[pa..], term(ra));
        } else {
            out.extend_from_slice(&key[start..start + n + 3]);
        }
    }
    out.into_boxed_slice()
}

fn transpose_key(key: &[u32], sp: &[(usize, usize)], i: usize, j: usize) -> Key {
    let mut out = Vec::with_capacity(key.len());
    for r in 0..sp.len() {
        let src = if r == i {
            j
        } else if r == j {
            i
        } else {
            r
        };
        let (start, n) = sp[src];
        out.extend_from_slice(&key[start..start + n + 3]);
    }
    out.into_boxed_slice()
}

/// (rollout, state offset) of a state id.
fn locate(key: &[u32], sp: &[(usize, usize)], id: u32) -> Option<(usize, usize)> {
    sp.iter().enumerate().find_map(|(r, &(start, n))| {
        key[start + 2..start + 2 + n].iter().position(|&s| s == id).map(|p| (r, p))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CompactOp {
    Identity,
    OnePoint(u32, u32),
    SingleSwap(u32, u32),
    Transpose(usize, usize),
}

impl CompactOp {
    fn apply(&self, key: &[u32]) -> Key {
        match *self {
            CompactOp::Identity => key.into(),
            CompactOp::OnePoint(x, y) => {
                let sp = spans(key);
                match (locate(key, &sp, x), locate(key, &sp, y)) {
                    (Some(a), Some(b)) if a.0 != b.0 => swap_tails(key, &sp, a, b),
                    _ => key.into(),
                }
            }
            CompactOp::SingleSwap(x, y) => {
                let mut out: Key = key.into();
                let sp = spans(key);
                for &(start, n) in &sp {
                    for s in &mut out[start + 2..start + 2 + n] {
                        if *s == x {
                            *s = y;
                        } else if *s == y {
                            *s = x;
                        }
                    }
                }
                out
            }
            CompactOp::Transpose(i, j) => transpose_key(key, &spans(key), i, j),
        }
    }
}

/// Label tables shared by every member of an orbit.
#[derive(Debug, Clone)]
struct Codec {
    actions: Vec<Symbol>,
    states: Vec<StateLabel>,
    terminals: Vec<TerminalLabel>,
    action_ids: HashMap<Symbol, u32>,
    state_ids: HashMap<StateLabel, u32>,
    terminal_ids: HashMap<TerminalLabel, u32>,
}

impl Codec {
    fn new(pop: &Population) -> Self {
        let mut codec = Codec {
            actions: vec![],
            states: vec![],
            terminals: vec![],
            action_ids: HashMap::new(),
            state_ids: HashMap::new(),
            terminal_ids: HashMap::new(),
        };
        for r in pop.rollouts() {
            if !codec.action_ids.contains_key(&r.action) {
                codec.action_ids.insert(r.action.clone(), codec.actions.len() as u32);
                codec.actions.push(r.action.clone());
            }
            for s in &r.states {
                codec.state_ids.insert(s.clone(), codec.states.len() as u32);
                codec.states.push(s.clone());
            }
            codec.terminal_ids.insert(r.terminal.clone(), codec.terminals.len() as u32);
            codec.terminals.push(r.terminal.clone());
        }
        codec
    }

    /// `None` when `pop` uses labels outside the tables.
    fn encode(&self, pop: &Population) -> Option<Key> {
        let mut out = Vec::new();
        for r in pop.rollouts() {
            out.push(*self.action_ids.get(&r.action)?);
            out.push(r.states.len() as u32);
            for s in &r.states {
                out.push(*self.state_ids.get(s)?);
            }
            out.push(*self.terminal_ids.get(&r.terminal)?);
        }
        Some(out.into_boxed_slice())
    }

    fn decode(&self, key: &[u32]) -> Population {
        let rollouts = spans(key)
            .into_iter()
            .map(|(start, n)| Rollout {
                action: self.actions[key[start] as usize].clone(),
                states: key[start + 2..start + 2 + n].iter().map(|&s| self.states[s as usize].clone()).collect(),
                terminal: self.terminals[key[start + 2 + n] as usize].clone(),
            })
            .collect();
        Population::from_valid(rollouts)
    }

    fn compile_op(&self, op: &RecombOp) -> Option<CompactOp> {
        let id = |class: u32, letter: &crate::model::Letter| {
            self.state_ids.get(&StateLabel::new(class, letter.clone())).copied()
        };
        Some(match op {
            RecombOp::Identity => CompactOp::Identity,
            RecombOp::OnePoint { class, x, y } => CompactOp::OnePoint(id(*class, x)?, id(*class, y)?),
            RecombOp::SingleSwap { class, x, y } => CompactOp::SingleSwap(id(*class, x)?, id(*class, y)?),
            RecombOp::Transpose { i, j } => CompactOp::Transpose(i - 1, j - 1),
        })
    }
}

/// Schema resolved against label tables whose ids are given by `class_of`
/// (state entry → class) and the action and terminal lists.
enum Matcher {
    All,
    Never,
    Pattern { action: u32, classes: Vec<u32>, terminals: Option<HashSet<u32>> },
}

impl Matcher {
    fn new(schema: &Schema, actions: &[Symbol], terminals: &[TerminalLabel]) -> Self {
        match schema {
            Schema::Root => Matcher::All,
            Schema::Pattern { action, classes, tail } => {
                let Some(a) = actions.iter().position(|x| x == action) else {
                    return Matcher::Never;
                };
                let terminals = match tail {
                    Tail::Any => None,
                    Tail::Terminal(f) => Some(
                        terminals.iter().enumerate().filter(|(_, t)| t.name == *f).map(|(k, _)| k as u32).collect(),
                    ),
                };
                Matcher::Pattern { action: a as u32, classes: classes.clone(), terminals }
            }
        }
    }

    fn count(&self, key: &[u32], class_of: impl Fn(u32) -> u32) -> usize {
        match self {
            Matcher::All => spans(key).len(),
            Matcher::Never => 0,
            Matcher::Pattern { .. } => spans(key).into_iter().filter(|&sp| self.matches_span(key, sp, &class_of)).count(),
        }
    }

    fn matches_span(&self, key: &[u32], (start, n): (usize, usize), class_of: impl Fn(u32) -> u32) -> bool {
        match self {
            Matcher::All => true,
            Matcher::Never => false,
            Matcher::Pattern { action, classes, terminals } => {
                if key[start] != *action || n < classes.len() {
                    return false;
                }
                let states = &key[start + 2..start + 2 + n];
                if !states.iter().zip(classes).all(|(&s, &c)| class_of(s) == c) {
                    return false;
                }
                match terminals {
                    None => true,
                    Some(set) => n == classes.len() && set.contains(&key[start + 2 + n]),
                }
            }
        }
    }
}

/// Members in discovery order, their indices, and the layer sizes.
type Closure = (Vec<Key>, HashMap<Key, u32>, Vec<usize>);

/// Breadth-first closure of `start` under `moves`, each layer sorted.
fn bfs<F>(start: Key, cap: usize, moves: F) -> Result<Closure>
where
    F: Fn(&[u32]) -> Vec<Key> + Sync,
{
    let mut members = vec![start.clone()];
    let mut index: HashMap<Key, u32> = HashMap::from([(start, 0)]);
    let mut layers = vec![1];
    if cap < 1 {
        return Err(Error::CapExceeded { cap, frontier: 1 });
    }
    let mut frontier = 0..1;
    while !frontier.is_empty() {
        let mut fresh: Vec<Key> = members[frontier.clone()]
            .par_iter()
            .flat_map_iter(|k| moves(k))
            .filter(|k| !index.contains_key(k))
            .collect();
        fresh.par_sort_unstable();
        fresh.dedup();
        if members.len() + fresh.len() > cap {
            return Err(Error::CapExceeded { cap, frontier: fresh.len() });
        }
        let lo = members.len();
        for k in fresh {
            index.insert(k.clone(), members.len() as u32);
            members.push(k);
        }
        if members.len() > lo {
            layers.push(members.len() - lo);
        }
        frontier = lo..members.len();
    }
    Ok((members, index, layers))
}

/// The orbit `[P]`, members in BFS order, each layer sorted by key.
#[derive(Debug, Clone)]
pub struct OrbitIndex {
    codec: Codec,
    members: Vec<Key>,
    index: HashMap<Key, u32>,
    layers: Vec<usize>,
    generators: Vec<RecombOp>,
    compact: Vec<CompactOp>,
    include_transpositions: bool,
    population_size: usize,
}

pub fn enumerate_orbit(pop: &Population, include_transpositions: bool, cap: usize) -> Result<OrbitIndex> {
    let codec = Codec::new(pop);
    let generators = enumerate_generators(pop, include_transpositions);
    let compact: Vec<CompactOp> =
        generators.iter().map(|op| codec.compile_op(op).expect("generators use labels of pop")).collect();
    let start = codec.encode(pop).expect("pop encodes against its own tables");
    let (members, index, layers) =
        bfs(start, cap, |k| compact.iter().filter(|op| **op != CompactOp::Identity).map(|op| op.apply(k)).collect())?;
    Ok(OrbitIndex {
        codec,
        members,
        index,
        layers,
        generators,
        compact,
        include_transpositions,
        population_size: pop.size(),
    })
}

impl OrbitIndex {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sizes of the BFS layers.
    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn generators(&self) -> &[RecombOp] {
        &self.generators
    }

    pub fn include_transpositions(&self) -> bool {
        self.include_transpositions
    }

    pub fn population_size(&self) -> usize {
        self.population_size
    }

    pub fn population(&self, i: usize) -> Population {
        self.codec.decode(&self.members[i])
    }

    pub fn populations(&self) -> impl Iterator<Item = Population> + '_ {
        self.members.iter().map(|k| self.codec.decode(k))
    }

    pub fn index_of(&self, pop: &Population) -> Option<usize> {
        let key = self.codec.encode(pop)?;
        self.index.get(&key).map(|&i| i as usize)
    }

    pub fn contains(&self, pop: &Population) -> bool {
        self.index_of(pop).is_some()
    }

    /// Index of the image of member `i` under generator `g`.
    pub fn successor(&self, i: usize, g: usize) -> usize {
        let key = self.compact[g].apply(&self.members[i]);
        self.index[&key] as usize
    }

    fn class_of(&self) -> impl Fn(u32) -> u32 + '_ {
        |s| self.codec.states[s as usize].class
    }

    fn matcher(&self, schema: &Schema) -> Matcher {
        Matcher::new(schema, &self.codec.actions, &self.codec.terminals)
    }

    /// `Σ_Q 𝒳(h, Q)` over the orbit.
    pub fn total_matches(&self, schema: &Schema) -> u64 {
        let m = self.matcher(schema);
        let class_of = self.class_of();
        self.members.par_iter().map(|k| m.count(k, &class_of) as u64).sum()
    }

    /// Members whose first rollout fits the schema.
    pub fn first_slot_matches(&self, schema: &Schema) -> u64 {
        let m = self.matcher(schema);
        let class_of = self.class_of();
        self.members.par_iter().filter(|k| m.matches_span(k, spans(k)[0], &class_of)).count() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactFrequency {
    /// `Σ_Q 𝒳(h,Q) / (b |[P]|)`.
    pub value: Rational,
    /// Fraction of members whose first rollout fits; with transpositions
    /// among the generators this equals `value`.
    pub first_slot: Option<Rational>,
    pub orbit_size: BigUint,
}

impl ExactFrequency {
    fn new(total: BigUint, b: usize, size: BigUint, first: Option<BigUint>) -> Self {
        let size_i = BigInt::from(size.clone());
        ExactFrequency {
            value: Rational::new(BigInt::from(total), BigInt::from(b) * &size_i),
            first_slot: first.map(|f| Rational::new(BigInt::from(f), size_i.clone())),
            orbit_size: size,
        }
    }

    fn with_size(mut self, size: BigUint) -> Self {
        self.orbit_size = size;
        self
    }

    /// The two expressions agree (trivially when only one is available).
    pub fn consistent(&self) -> bool {
        self.first_slot.as_ref().map_or(true, |f| *f == self.value)
    }
}

/// Long-run fraction of rollouts fitting `schema` under the uniform
/// distribution on the orbit.
pub fn exact_limit_frequency(orbit: &OrbitIndex, schema: &Schema) -> ExactFrequency {
    let total = BigUint::from(orbit.total_matches(schema));
    let first = orbit.include_transpositions.then(|| BigUint::from(orbit.first_slot_matches(schema)));
    ExactFrequency::new(total, orbit.population_size, BigUint::from(orbit.len()), first)
}

/// `p(X → Y) = Σ μ(θ)` over the generators `θ` with `θ(X) = Y`.
pub fn orbit_transition_matrix(orbit: &OrbitIndex, mu: &MixingDistribution) -> Result<StochasticMatrix<Rational>> {
    let n = orbit.len();
    if n > DENSE_LIMIT {
        return Err(Error::invalid(format!("orbit of {n} populations is too large for a dense matrix")));
    }
    let mut slots = Vec::with_capacity(mu.ops().len());
    for (op, w) in mu.ops().iter().zip(mu.weights()) {
        let g = orbit
            .generators
            .iter()
            .position(|x| x == op)
            .ok_or_else(|| Error::OrbitMismatch(format!("{op} is not a generator of this orbit")))?;
        slots.push((g, w));
    }
    let rows: Vec<Vec<Rational>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![Rational::zero(); n];
            for &(g, w) in &slots {
                row[orbit.successor(i, g)] += w;
            }
            row
        })
        .collect();
    StochasticMatrix::new(rows)
}

/// Orbit of rollout shapes (letters forgotten); see the module docs.
#[derive(Debug, Clone)]
pub struct ShapeOrbit {
    actions: Vec<Symbol>,
    terminals: Vec<TerminalLabel>,
    members: Vec<Key>,
    layers: Vec<usize>,
    labelings: BigUint,
    include_transpositions: bool,
    population_size: usize,
}

/// Moves on shape keys: tail exchanges at every pair of equal-class
/// positions in distinct rollouts, plus transpositions if requested.
fn shape_moves(key: &[u32], include_transpositions: bool) -> Vec<Key> {
    let sp = spans(key);
    let mut by_class: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (r, &(start, n)) in sp.iter().enumerate() {
        for p in 0..n {
            by_class.entry(key[start + 2 + p]).or_default().push((r, p));
        }
    }
    let mut out = Vec::new();
    for occ in by_class.values() {
        for (k, &a) in occ.iter().enumerate() {
            for &b in &occ[k + 1..] {
                if a.0 != b.0 {
                    out.push(swap_tails(key, &sp, a, b));
                }
            }
        }
    }
    if include_transpositions {
        for i in 0..sp.len() {
            for j in i + 1..sp.len() {
                out.push(transpose_key(key, &sp, i, j));
            }
        }
    }
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn enumerate_shape_orbit(pop: &Population, include_transpositions: bool, cap: usize) -> Result<ShapeOrbit> {
    let codec = Codec::new(pop);
    let mut start = Vec::new();
    for r in pop.rollouts() {
        start.push(codec.action_ids[&r.action]);
        start.push(r.states.len() as u32);
        start.extend(r.states.iter().map(|s| s.class));
        start.push(codec.terminal_ids[&r.terminal]);
    }
    let (members, _, layers) = bfs(start.into_boxed_slice(), cap, |k| shape_moves(k, include_transpositions))?;
    let labelings = pop.letters_by_class().values().map(|ls| factorial(ls.len())).product();
    Ok(ShapeOrbit {
        actions: codec.actions,
        terminals: codec.terminals,
        members,
        layers,
        labelings,
        include_transpositions,
        population_size: pop.size(),
    })
}

impl ShapeOrbit {
    /// Number of distinct shapes.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    /// Populations per shape: `Π_i n_i!`.
    pub fn labelings_per_shape(&self) -> &BigUint {
        &self.labelings
    }

    /// Size of the full orbit `[P]`.
    pub fn labeled_size(&self) -> BigUint {
        BigUint::from(self.members.len()) * &self.labelings
    }

    pub fn include_transpositions(&self) -> bool {
        self.include_transpositions
    }

    /// Member `i` as (action, classes, terminal) per rollout.
    pub fn shape(&self, i: usize) -> Vec<(Symbol, Vec<u32>, TerminalLabel)> {
        let key = &self.members[i];
        spans(key)
            .into_iter()
            .map(|(start, n)| {
                (
                    self.actions[key[start] as usize].clone(),
                    key[start + 2..start + 2 + n].to_vec(),
                    self.terminals[key[start + 2 + n] as usize].clone(),
                )
            })
            .collect()
    }

    /// Same value as [`exact_limit_frequency`] on the full orbit.
    pub fn exact_frequency(&self, schema: &Schema) -> ExactFrequency {
        let m = Matcher::new(schema, &self.actions, &self.terminals);
        let class_of = |c: u32| c;
        let total: u64 = self.members.par_iter().map(|k| m.count(k, class_of) as u64).sum();
        let first = self.include_transpositions.then(|| {
            BigUint::from(self.members.par_iter().filter(|k| m.matches_span(k, spans(k)[0], class_of)).count() as u64)
        });
        // Every shape has the same number of labelings, which cancels.
        ExactFrequency::new(BigUint::from(total), self.population_size, BigUint::from(self.members.len()), first)
            .with_size(self.labeled_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_population, parse_schema};

    fn p0() -> Population {
        parse_population("alpha: 1/a -> f1\nbeta: 1/b -> f2").unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn p0_orbits() {
        let with = enumerate_orbit(&p0(), true, DEFAULT_CAP).unwrap();
        assert_eq!(with.len(), 8);
        let without = enumerate_orbit(&p0(), false, DEFAULT_CAP).unwrap();
        assert_eq!(without.len(), 4);
        assert_eq!(with.population(0), p0());
        assert!(with.contains(&p0()));
        let h = parse_schema("alpha: 1 -> f1").unwrap();
        let f = exact_limit_frequency(&with, &h);
        assert_eq!(f.value, rat(1, 4));
        assert_eq!(f.first_slot, Some(rat(1, 4)));
        assert_eq!(exact_limit_frequency(&without, &parse_schema("alpha: 1 -> #").unwrap()).value, rat(1, 2));
        assert_eq!(exact_limit_frequency(&without, &Schema::Root).value, rat(1, 1));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_orbit(&p0(), true, 1), Err(Error::CapExceeded { cap: 1, .. })));
    }

    #[test]
    fn shapes_match_labeled_orbit() {
        let p1 = parse_population("alpha: 1/a, 2/a -> f1\nbeta: 2/b, 1/b -> f2").unwrap();
        for trans in [false, true] {
            let full = enumerate_orbit(&p1, trans, DEFAULT_CAP).unwrap();
            let shapes = enumerate_shape_orbit(&p1, trans, DEFAULT_CAP).unwrap();
            assert_eq!(BigUint::from(full.len()), shapes.labeled_size());
            for s in ["alpha: 1 -> #", "alpha: 1, 2 -> f1", "beta: 2, 1, 2 -> #", "#"] {
                let h = parse_schema(s).unwrap();
                assert_eq!(exact_limit_frequency(&full, &h).value, shapes.exact_frequency(&h).value, "{s}");
            }
        }
    }

    #[test]
    fn transition_matrix_is_doubly_stochastic() {
        let o = enumerate_orbit(&p0(), false, DEFAULT_CAP).unwrap();
        let mu = crate::mixing::uniform_mixing(&p0(), false);
        let m = orbit_transition_matrix(&o, &mu).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(m.is_doubly_stochastic(0.0));
        let id = MixingDistribution::proportional(vec![RecombOp::Identity], &[1]).unwrap();
        assert_eq!(orbit_transition_matrix(&o, &id).unwrap(), StochasticMatrix::identity(4));
        let foreign = MixingDistribution::proportional(vec![RecombOp::Transpose { i: 1, j: 2 }], &[1]).unwrap();
        assert!(matches!(orbit_transition_matrix(&o, &foreign), Err(Error::OrbitMismatch(_))));
    }
}
