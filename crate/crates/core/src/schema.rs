//! Holland-Poli rollout schemata and their partial order.

use std::fmt;

use crate::model::{Rollout, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tail {
    /// `#`: any continuation, including none.
    Any,
    /// The rollout ends right after the listed classes with this terminal
    /// name; copy indices are ignored.
    Terminal(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Schema {
    /// `#`, matched by every rollout.
    Root,
    Pattern { action: Symbol, classes: Vec<u32>, tail: Tail },
}

impl Schema {
    pub fn pattern(action: &str, classes: &[u32], tail: Tail) -> Self {
        Schema::Pattern { action: Symbol::new(action), classes: classes.to_vec(), tail }
    }

    /// `(action, classes.., #)`
    pub fn open(action: &str, classes: &[u32]) -> Self {
        Self::pattern(action, classes, Tail::Any)
    }

    /// `(action, classes.., terminal)`
    pub fn closed(action: &str, classes: &[u32], terminal: &str) -> Self {
        Self::pattern(action, classes, Tail::Terminal(Symbol::new(terminal)))
    }

    /// Number of class entries.
    pub fn height(&self) -> usize {
        match self {
            Schema::Root => 0,
            Schema::Pattern { classes, .. } => classes.len(),
        }
    }

    pub fn matches(&self, rollout: &Rollout) -> bool {
        match self {
            Schema::Root => true,
            Schema::Pattern { action, classes, tail } => {
                if rollout.action != *action || rollout.states.len() < classes.len() {
                    return false;
                }
                if !rollout.classes().zip(classes).all(|(c, want)| c == *want) {
                    return false;
                }
                match tail {
                    Tail::Any => true,
                    Tail::Terminal(f) => {
                        rollout.states.len() == classes.len() && rollout.terminal.name == *f
                    }
                }
            }
        }
    }

    /// `self >= other` in the schema order, i.e. `other` refines `self`.
    pub fn is_above(&self, other: &Schema) -> bool {
        schema_leq(other, self)
    }
}

/// True iff `h >= g`: `g` equals `h`, or `h` is `#`, or `h` ends in `#` and
/// `g` extends the prefix of `h` (strictly, when `g` also ends in `#`).
pub fn schema_leq(g: &Schema, h: &Schema) -> bool {
    if g == h {
        return true;
    }
    match (h, g) {
        (Schema::Root, _) => true,
        (_, Schema::Root) => false,
        (
            Schema::Pattern { action: ha, classes: hc, tail: Tail::Any },
            Schema::Pattern { action: ga, classes: gc, tail: gt },
        ) => {
            ha == ga
                && gc.starts_with(hc)
                && match gt {
                    Tail::Any => gc.len() > hc.len(),
                    Tail::Terminal(_) => true,
                }
        }
        _ => false,
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schema::Root => f.write_str("#"),
            Schema::Pattern { action, classes, tail } => {
                write!(f, "{action}: ")?;
                for (k, c) in classes.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                match tail {
                    Tail::Any => f.write_str(" -> #"),
                    Tail::Terminal(t) => write!(f, " -> {t}"),
                }
            }
        }
    }
}
