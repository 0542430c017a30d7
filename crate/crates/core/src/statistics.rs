//! Downward sets, adjacency counts and inflation.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Letter, Population, Rollout, StateLabel, Symbol, TerminalLabel};

/// `a↓`, `i↓` and `i↓_Σ` of a population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownwardReport {
    pub size: usize,
    /// Classes opening rollouts of each action.
    pub actions: BTreeMap<Symbol, BTreeSet<u32>>,
    /// Classes immediately following some state of each class.
    pub class_successors: BTreeMap<u32, BTreeSet<u32>>,
    /// Terminal labels immediately following some state of each class.
    /// Every class present in the population has an entry, possibly empty.
    pub terminal_successors: BTreeMap<u32, BTreeSet<TerminalLabel>>,
}

impl DownwardReport {
    pub fn action(&self, action: &str) -> Option<&BTreeSet<u32>> {
        self.actions.get(action)
    }

    /// `i↓_Σ`, 0 for classes not present.
    pub fn terminal_count(&self, class: u32) -> usize {
        self.terminal_successors.get(&class).map_or(0, BTreeSet::len)
    }

    /// Base names of the terminals in `i↓`, copy indices dropped.
    pub fn terminal_names(&self, class: u32) -> BTreeSet<Symbol> {
        self.terminal_successors
            .get(&class)
            .map(|ts| ts.iter().map(|t| t.name.clone()).collect())
            .unwrap_or_default()
    }

    /// `i↓` rendered as text: classes ascending, then terminal names.
    pub fn successor_labels(&self, class: u32) -> Vec<String> {
        let mut out: Vec<String> = self
            .class_successors
            .get(&class)
            .into_iter()
            .flatten()
            .map(u32::to_string)
            .collect();
        out.extend(self.terminal_names(class).iter().map(|s| s.to_string()));
        out
    }

    pub fn classes(&self) -> impl Iterator<Item = u32> + '_ {
        self.terminal_successors.keys().copied()
    }

    /// Same sets after dropping copy indices, so an inflation compares
    /// equal to its base population apart from the terminal counts.
    pub fn same_sets(&self, other: &DownwardReport) -> bool {
        self.actions == other.actions
            && self.class_successors == other.class_successors
            && self.terminal_successors.keys().eq(other.terminal_successors.keys())
            && self.classes().all(|c| self.terminal_names(c) == other.terminal_names(c))
    }
}

pub fn downward(pop: &Population) -> DownwardReport {
    let mut actions: BTreeMap<Symbol, BTreeSet<u32>> = BTreeMap::new();
    let mut class_successors: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut terminal_successors: BTreeMap<u32, BTreeSet<TerminalLabel>> = BTreeMap::new();
    for r in pop.rollouts() {
        actions.entry(r.action.clone()).or_default().insert(r.states[0].class);
        for w in r.states.windows(2) {
            class_successors.entry(w[0].class).or_default().insert(w[1].class);
            terminal_successors.entry(w[0].class).or_default();
        }
        let last = r.states[r.states.len() - 1].class;
        terminal_successors.entry(last).or_default().insert(r.terminal.clone());
    }
    DownwardReport { size: pop.size(), actions, class_successors, terminal_successors }
}

/// `Order(a↓j)` and `Order(i↓j)`; missing entries are 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderTable {
    pub actions: BTreeMap<(Symbol, u32), usize>,
    pub classes: BTreeMap<(u32, u32), usize>,
}

impl OrderTable {
    pub fn action_order(&self, action: &str, class: u32) -> usize {
        self.actions.get(&(Symbol::new(action), class)).copied().unwrap_or(0)
    }

    pub fn class_order(&self, from: u32, to: u32) -> usize {
        self.classes.get(&(from, to)).copied().unwrap_or(0)
    }

    /// `Σ_j Order(i↓j)`.
    pub fn out_count(&self, class: u32) -> usize {
        self.classes.range((class, 0)..=(class, u32::MAX)).map(|(_, n)| n).sum()
    }

    /// Number of rollouts opened by `action`.
    pub fn action_total(&self, action: &str) -> usize {
        self.actions.iter().filter(|((a, _), _)| a.as_str() == action).map(|(_, n)| n).sum()
    }

    pub fn scaled(&self, m: usize) -> OrderTable {
        OrderTable {
            actions: self.actions.iter().map(|(k, v)| (k.clone(), v * m)).collect(),
            classes: self.classes.iter().map(|(k, v)| (*k, v * m)).collect(),
        }
    }
}

pub fn order_table(pop: &Population) -> OrderTable {
    let mut table = OrderTable::default();
    for r in pop.rollouts() {
        *table.actions.entry((r.action.clone(), r.states[0].class)).or_default() += 1;
        for w in r.states.windows(2) {
            *table.classes.entry((w[0].class, w[1].class)).or_default() += 1;
        }
    }
    table
}

/// `m` formally distinct copies of every rollout, copy `k` tagging each
/// letter and the terminal with `.k`. Copies of a rollout are consecutive.
pub fn inflate(pop: &Population, m: u32) -> Result<Population> {
    if m < 1 {
        return Err(Error::invalid("inflation factor must be at least 1"));
    }
    if pop.is_inflated() {
        return Err(Error::AlreadyInflated);
    }
    let mut rollouts = Vec::with_capacity(pop.size() * m as usize);
    for r in pop.rollouts() {
        for k in 1..=m {
            rollouts.push(Rollout {
                action: r.action.clone(),
                states: r
                    .states
                    .iter()
                    .map(|s| StateLabel::new(s.class, Letter { base: s.letter.base.clone(), copy: Some(k) }))
                    .collect(),
                terminal: TerminalLabel { name: r.terminal.name.clone(), copy: Some(k) },
            });
        }
    }
    Ok(Population::from_valid(rollouts))
}

/// The `stats` report: metrics, downward sets and order counts.
pub fn stats_json(pop: &Population) -> Value {
    let metrics = pop.metrics();
    let down = downward(pop);
    let order = order_table(pop);

    let mut down_actions = Map::new();
    for (a, set) in &down.actions {
        down_actions.insert(a.to_string(), json!(set));
    }
    let mut down_classes = Map::new();
    let mut sigma = Map::new();
    for c in down.classes() {
        down_classes.insert(c.to_string(), json!(down.successor_labels(c)));
        sigma.insert(c.to_string(), json!(down.terminal_count(c)));
    }
    let mut order_actions = Map::new();
    for ((a, j), n) in &order.actions {
        order_actions.insert(format!("{a}->{j}"), json!(n));
    }
    let mut order_classes = Map::new();
    for ((i, j), n) in &order.classes {
        order_classes.insert(format!("{i}->{j}"), json!(n));
    }
    json!({
        "b": metrics.size,
        "heights": metrics.heights,
        "total": metrics.total_states,
        "homologous": metrics.is_homologous,
        "down": { "actions": down_actions, "classes": down_classes },
        "down_sigma": sigma,
        "order": { "actions": order_actions, "classes": order_classes },
    })
}
