//! Closed-form limiting frequencies and a payoff evaluator built on them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::markov::linalg::solve;
use crate::model::{Population, Symbol};
use crate::schema::{Schema, Tail};
use crate::statistics::{downward, order_table, DownwardReport, OrderTable};
use crate::Rational;

/// Payoff per terminal base name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PayoffMap(BTreeMap<Symbol, Rational>);

impl PayoffMap {
    pub fn new(map: BTreeMap<Symbol, Rational>) -> Self {
        PayoffMap(map)
    }

    pub fn get(&self, terminal: &str) -> Option<&Rational> {
        self.0.get(terminal)
    }

    pub fn insert(&mut self, terminal: &str, value: Rational) {
        self.0.insert(Symbol::new(terminal), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub numerator: usize,
    pub denominator: usize,
}

impl Factor {
    /// 0 whenever the numerator is 0, whatever the denominator.
    pub fn value(&self) -> Rational {
        if self.numerator == 0 {
            Rational::zero()
        } else {
            Rational::new(BigInt::from(self.numerator), BigInt::from(self.denominator))
        }
    }
}

/// The factor contributed by the schema's tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LastFactor {
    /// Tail `#`: factor 1.
    Open,
    /// Terminal name never follows the last class: factor 0.
    Absent,
    /// Terminals with the requested name over all successors of the last class.
    Fraction(Factor),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub value: Rational,
    /// `Order(a↓i1)/b`; `None` for the root schema.
    pub first: Option<Factor>,
    /// `Order(i_{q-1}↓i_q) / D(i_{q-1})` for each later class.
    pub steps: Vec<Factor>,
    pub last: Option<LastFactor>,
    /// The population is homologous, so the value is exact at every inflation.
    pub homologous_exact: bool,
    /// Some numerator vanished and the value is 0 by convention.
    pub zero_by_convention: bool,
}

impl Prediction {
    pub fn to_json(&self) -> Value {
        let factor = |f: &Factor| json!({ "numerator": f.numerator, "denominator": f.denominator });
        let last = match &self.last {
            None => Value::Null,
            Some(LastFactor::Open) => json!("open"),
            Some(LastFactor::Absent) => json!("absent"),
            Some(LastFactor::Fraction(f)) => factor(f),
        };
        json!({
            "value": self.value.to_string(),
            "decimal": self.value.to_f64(),
            "first": self.first.as_ref().map(factor),
            "steps": self.steps.iter().map(factor).collect::<Vec<_>>(),
            "last": last,
            "homologous_exact": self.homologous_exact,
            "zero_by_convention": self.zero_by_convention,
        })
    }
}

/// Number of successors of `class`: `Σ_j Order(i↓j) + i↓_Σ`, which is also
/// the number of occurrences of the class.
fn successor_total(order: &OrderTable, down: &DownwardReport, class: u32) -> usize {
    order.out_count(class) + down.terminal_count(class)
}

/// Limit over inflations of the long-run fraction of rollouts fitting
/// `schema`.
///
/// The tail factor counts the terminals following the last class whose base
/// name matches, which is 0 or 1 on an un-inflated population and scales
/// with the other counts under inflation, so the value is the same for `P`
/// and every `P_m`.
pub fn predict_schema_frequency(pop: &Population, schema: &Schema) -> Prediction {
    let homologous_exact = pop.is_homologous();
    let Schema::Pattern { action, classes, tail } = schema else {
        return Prediction {
            value: Rational::one(),
            first: None,
            steps: vec![],
            last: None,
            homologous_exact,
            zero_by_convention: false,
        };
    };
    let down = downward(pop);
    let order = order_table(pop);

    let first = Factor { numerator: order.action_order(action, classes[0]), denominator: pop.size() };
    let steps: Vec<Factor> = classes
        .windows(2)
        .map(|w| Factor {
            numerator: order.class_order(w[0], w[1]),
            denominator: successor_total(&order, &down, w[0]),
        })
        .collect();
    let last_class = classes[classes.len() - 1];
    let last = match tail {
        Tail::Any => LastFactor::Open,
        Tail::Terminal(f) => {
            let matching = down
                .terminal_successors
                .get(&last_class)
                .map_or(0, |ts| ts.iter().filter(|t| t.name == *f).count());
            if matching == 0 {
                LastFactor::Absent
            } else {
                LastFactor::Fraction(Factor {
                    numerator: matching,
                    denominator: successor_total(&order, &down, last_class),
                })
            }
        }
    };

    let zero_by_convention = first.numerator == 0
        || steps.iter().any(|f| f.numerator == 0)
        || last == LastFactor::Absent;
    let value = if zero_by_convention {
        Rational::zero()
    } else {
        let mut v = first.value();
        for f in &steps {
            v *= f.value();
        }
        if let LastFactor::Fraction(f) = &last {
            v *= f.value();
        }
        v
    };
    Prediction { value, first: Some(first), steps, last: Some(last), homologous_exact, zero_by_convention }
}

/// Expected terminal payoff of a rollout drawn from the limiting
/// distribution, conditioned on opening with `action`.
///
/// From class `i` the walk moves to class `j` with probability
/// `Order(i↓j)/D(i)` and stops at each terminal of `i↓` with probability
/// `1/D(i)`; the start class is drawn proportionally to `Order(action↓i)`.
pub fn predict_action_value(pop: &Population, action: &str, payoffs: &PayoffMap) -> Result<Rational> {
    let down = downward(pop);
    let order = order_table(pop);
    let total = order.action_total(action);
    if total == 0 {
        return Err(Error::ActionAbsent(action.to_string()));
    }
    let classes: Vec<u32> = down.classes().collect();
    let index: BTreeMap<u32, usize> = classes.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let n = classes.len();

    // (I - Q) v = r
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut r = vec![Rational::zero(); n];
    for (k, &c) in classes.iter().enumerate() {
        let d = BigInt::from(successor_total(&order, &down, c));
        a[k][k] = Rational::one();
        for j in down.class_successors.get(&c).into_iter().flatten() {
            let p = Rational::new(BigInt::from(order.class_order(c, *j)), d.clone());
            a[k][index[j]] -= p;
        }
        for t in down.terminal_successors.get(&c).into_iter().flatten() {
            let pay = payoffs.get(&t.name).ok_or_else(|| Error::MissingPayoff(t.name.to_string()))?;
            r[k] += pay / Rational::from_integer(d.clone());
        }
    }
    let v = solve(a, r)?;
    let mut value = Rational::zero();
    for (k, &c) in classes.iter().enumerate() {
        let w = order.action_order(action, c);
        if w > 0 {
            value += &v[k] * Rational::new(BigInt::from(w), BigInt::from(total));
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_population, parse_schema};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p0() -> Population {
        parse_population("alpha: 1/a -> f1\nbeta: 1/b -> f2").unwrap()
    }

    #[test]
    fn p0_terminal_schema() {
        let p = predict_schema_frequency(&p0(), &parse_schema("alpha: 1 -> f1").unwrap());
        assert_eq!(p.value, rat(1, 4));
        assert!(p.homologous_exact);
        assert_eq!(p.last, Some(LastFactor::Fraction(Factor { numerator: 1, denominator: 2 })));
    }

    #[test]
    fn root_is_one() {
        assert_eq!(predict_schema_frequency(&p0(), &Schema::Root).value, rat(1, 1));
    }

    #[test]
    fn missing_terminal_is_zero() {
        let p = predict_schema_frequency(&p0(), &parse_schema("alpha: 1 -> f9").unwrap());
        assert_eq!(p.value, rat(0, 1));
        assert!(p.zero_by_convention);
    }

    #[test]
    fn absent_class_is_zero_not_nan() {
        let p = predict_schema_frequency(&p0(), &parse_schema("alpha: 1, 7, 8 -> #").unwrap());
        assert_eq!(p.value, rat(0, 1));
        assert_eq!(p.steps[1], Factor { numerator: 0, denominator: 0 });
    }

    #[test]
    fn action_value_p0() {
        let mut pay = PayoffMap::default();
        pay.insert("f1", rat(1, 1));
        pay.insert("f2", rat(0, 1));
        assert_eq!(predict_action_value(&p0(), "alpha", &pay).unwrap(), rat(1, 2));
        assert!(matches!(predict_action_value(&p0(), "gamma", &pay), Err(Error::ActionAbsent(_))));
        pay = PayoffMap::default();
        pay.insert("f1", rat(1, 1));
        assert!(matches!(predict_action_value(&p0(), "alpha", &pay), Err(Error::MissingPayoff(_))));
    }
}
