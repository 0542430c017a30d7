mod common;

use geiringer::orbit::enumerate_shape_orbit;
use geiringer::{
    downward, enumerate_generators, enumerate_orbit, exact_limit_frequency, inflate, order_table, parse_population,
    parse_schema, predict_schema_frequency, Error, Population, Rational, Schema,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::*;

fn population() -> impl Strategy<Value = Population> {
    any::<u64>().prop_map(|seed| random_population(&mut rng(seed)))
}

/// Schemata built from the population's own statistics, plus a few misses.
fn schemata(p: &Population) -> Vec<Schema> {
    let mut out = vec![Schema::Root];
    for r in p.rollouts() {
        let classes: Vec<u32> = r.classes().collect();
        for k in 1..=classes.len().min(3) {
            out.push(Schema::open(r.action.as_str(), &classes[..k]));
        }
        out.push(Schema::closed(r.action.as_str(), &classes, r.terminal.name.as_str()));
        out.push(Schema::open(r.action.as_str(), &[9]));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generators_are_involutions_and_preserve_statistics(p in population(), pick in any::<prop::sample::Index>()) {
        let gens = enumerate_generators(&p, true);
        let op = pick.get(&gens);
        let once = op.apply(&p).unwrap();
        prop_assert_eq!(&op.apply(&once).unwrap(), &p);
        prop_assert!(downward(&once).same_sets(&downward(&p)));
        prop_assert_eq!(order_table(&once), order_table(&p));
        prop_assert_eq!(once.total_states(), p.total_states());
        prop_assert!(Population::new(once.rollouts().to_vec()).is_ok());
        for h in schemata(&p) {
            prop_assert_eq!(predict_schema_frequency(&once, &h).value, predict_schema_frequency(&p, &h).value);
        }
    }

    #[test]
    fn swaps_and_transpositions_keep_height_multiset(p in population(), pick in any::<prop::sample::Index>()) {
        let gens: Vec<_> = enumerate_generators(&p, true)
            .into_iter()
            .filter(|g| !matches!(g, geiringer::RecombOp::OnePoint { .. }))
            .collect();
        let op = pick.get(&gens);
        let mut before = p.heights();
        let mut after = op.apply(&p).unwrap().heights();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn text_round_trip(p in population()) {
        prop_assert_eq!(parse_population(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn predictions_lie_in_unit_interval(p in population()) {
        for h in schemata(&p) {
            let v = predict_schema_frequency(&p, &h).value;
            prop_assert!(v >= Rational::zero() && v <= Rational::one(), "{} -> {}", h, v);
        }
    }

    #[test]
    fn height_one_predictions_sum_to_action_share(p in population()) {
        let d = downward(&p);
        for (action, classes) in &d.actions {
            let total: Rational = classes
                .iter()
                .map(|c| predict_schema_frequency(&p, &Schema::open(action.as_str(), &[*c])).value)
                .sum();
            let opened = p.rollouts().iter().filter(|r| r.action == *action).count();
            prop_assert_eq!(total, rat(opened as i64, p.size() as i64));
        }
    }

    #[test]
    fn terminal_counts_sum_to_size(p in population(), m in 1u32..4) {
        let pm = inflate(&p, m).unwrap();
        let d = downward(&pm);
        let sum: usize = d.classes().map(|c| d.terminal_count(c)).sum();
        prop_assert_eq!(sum, pm.size());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn orbit_oracles_agree(p in population()) {
        let plain = match enumerate_orbit(&p, false, 5_000) {
            Ok(o) => o,
            Err(Error::CapExceeded { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let with_t = match enumerate_orbit(&p, true, 20_000) {
            Ok(o) => Some(o),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let shapes = enumerate_shape_orbit(&p, false, 5_000).unwrap();
        prop_assert_eq!(shapes.labeled_size(), num_bigint::BigUint::from(plain.len()));
        prop_assert!(plain.contains(&p));
        let gens = plain.generators().to_vec();
        for q in plain.populations() {
            for g in &gens {
                prop_assert!(plain.contains(&g.apply(&q).unwrap()));
            }
        }
        for h in schemata(&p) {
            let f = exact_limit_frequency(&plain, &h);
            prop_assert_eq!(&shapes.exact_frequency(&h).value, &f.value);
            if let Some(o) = &with_t {
                let g = exact_limit_frequency(o, &h);
                prop_assert!(g.consistent());
                prop_assert_eq!(&g.value, &f.value);
            }
        }
    }

    #[test]
    fn homologous_orbits_match_prediction(seed in any::<u64>()) {
        // homologous: one state per rollout, every class at depth one
        let mut r = rng(seed);
        let b = rand::Rng::random_range(&mut r, 1..=4usize);
        let text: String = (0..b)
            .map(|k| format!("{}: {}/{} -> f{}\n", ["alpha", "beta"][k % 2], 1 + k % 2, ["a", "b", "c", "d"][k], k + 1))
            .collect();
        let p = parse_population(&text).unwrap();
        let orbit = enumerate_orbit(&p, false, 50_000).unwrap();
        for h in schemata(&p) {
            prop_assert_eq!(exact_limit_frequency(&orbit, &h).value, predict_schema_frequency(&p, &h).value);
        }
    }
}

#[test]
fn schema_text_round_trip() {
    for s in ["#", "alpha: 1 -> #", "beta: 2, 1 -> f6", "xi: 3, 2, 4 -> f5"] {
        assert_eq!(parse_schema(s).unwrap().to_string(), s);
    }
}
