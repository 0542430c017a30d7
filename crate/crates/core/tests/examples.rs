//! Worked examples for each operation on the shipped fixtures.

mod common;

use geiringer::recombination::RecombOp;
use geiringer::{
    apply_one_point, apply_sequence, apply_single_swap, apply_transposition, count_matching, downward,
    enumerate_generators, inflate, order_table, parse_op_sequence, parse_payoffs, parse_schema, predict_action_value,
    predict_schema_frequency, Error, Letter, Schema, TransformationSequence,
};

use common::*;

fn l(s: &str) -> Letter {
    Letter::new(s)
}

#[test]
fn absent_states_fix_the_population() {
    let p7 = fixture("p7.pop");
    assert_eq!(apply_one_point(&p7, 9, &l("a"), &l("b")), p7);
    assert_eq!(apply_single_swap(&p7, 1, &l("a"), &l("z")), p7);
}

#[test]
fn transpositions() {
    let p0 = fixture("p0.pop");
    let t = apply_transposition(&p0, 1, 2).unwrap();
    assert_eq!(t, pop("beta: 1/b -> f2\nalpha: 1/a -> f1"));
    assert_eq!(apply_transposition(&t, 1, 2).unwrap(), p0);
    assert!(matches!(apply_transposition(&fixture("p7.pop"), 1, 8), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn empty_sequence_is_identity() {
    let p7 = fixture("p7.pop");
    assert_eq!(apply_sequence(&p7, &TransformationSequence::default()).unwrap(), p7);
}

#[test]
fn generator_counts() {
    let p0 = fixture("p0.pop");
    let g = enumerate_generators(&p0, false);
    assert_eq!(g.len(), 3);
    assert_eq!(g[0], RecombOp::Identity);
    assert_eq!(enumerate_generators(&p0, true).len(), 4);
    assert_eq!(enumerate_generators(&fixture("p7.pop"), false).len(), 71);
    let lone = pop("alpha: 1/a, 2/a, 3/a -> f1");
    assert_eq!(enumerate_generators(&lone, false), vec![RecombOp::Identity]);
}

#[test]
fn op_text_round_trip() {
    let seq = parse_op_sequence("chi(1,c,d), nu(6,a,b), swap(1,2), id").unwrap();
    assert_eq!(seq.to_string(), "chi(1,c,d), nu(6,a,b), swap(1,2), id");
    assert!(parse_op_sequence("chi(1,c,c)").is_err());
    assert!(parse_op_sequence("swap(2,2)").is_err());
}

#[test]
fn downward_sets_of_p7() {
    let d = downward(&fixture("p7.pop"));
    let labels = |c| d.successor_labels(c);
    assert_eq!(labels(5), vec!["6", "f3", "f4"]);
    assert_eq!(labels(6), vec!["3", "5", "f2", "f7"]);
    assert_eq!(d.terminal_count(5), 2);
    assert_eq!(d.terminal_count(6), 2);
}

#[test]
fn downward_and_order_of_p0() {
    let p0 = fixture("p0.pop");
    let d = downward(&p0);
    assert_eq!(d.action("alpha").unwrap().iter().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(d.action("beta").unwrap().iter().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(d.successor_labels(1), vec!["f1", "f2"]);
    assert_eq!(d.terminal_count(1), 2);
    let o = order_table(&p0);
    assert_eq!(o.action_order("alpha", 1), 1);
    assert_eq!(o.action_order("beta", 1), 1);
    assert!(o.classes.is_empty());
}

#[test]
fn inflation_examples() {
    let p0 = fixture("p0.pop");
    let one = inflate(&p0, 1).unwrap();
    assert_eq!(one.to_string(), "alpha: 1/a.1 -> f1.1\nbeta: 1/b.1 -> f2.1\n");
    let two = inflate(&p0, 2).unwrap();
    assert_eq!(two.size(), 4);
    assert_eq!(order_table(&two).action_order("alpha", 1), 2);
    assert_eq!(two.total_states(), 4);
    assert!(matches!(inflate(&two, 2), Err(Error::AlreadyInflated)));
    assert!(inflate(&p0, 0).is_err());

    let p7 = fixture("p7.pop");
    let three = inflate(&p7, 3).unwrap();
    assert_eq!(three.size(), 21);
    let d = downward(&three);
    assert_eq!(d.action("alpha").unwrap().iter().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(d.terminal_count(2), 3);
}

#[test]
fn inflation_scaling() {
    let p7 = fixture("p7.pop");
    let base = order_table(&p7);
    let d = downward(&p7);
    for m in 1..=4u32 {
        let pm = inflate(&p7, m).unwrap();
        assert_eq!(order_table(&pm), base.scaled(m as usize));
        assert_eq!(pm.total_states(), m as usize * p7.total_states());
        let dm = downward(&pm);
        assert!(dm.same_sets(&d));
        for c in d.classes() {
            assert_eq!(dm.terminal_count(c), m as usize * d.terminal_count(c));
        }
    }
    assert!(inflate(&fixture("p0.pop"), 3).unwrap().is_homologous());
}

fn predict(p: &str, h: &str) -> geiringer::Rational {
    predict_schema_frequency(&fixture(p), &parse_schema(h).unwrap()).value
}

#[test]
fn predictions() {
    assert_eq!(predict("p7.pop", "alpha: 1 -> #"), rat(2, 7));
    assert_eq!(predict("p7.pop", "beta: 2, 1 -> #"), rat(1, 35));
    assert_eq!(predict("p7.pop", "xi: 2 -> f6"), rat(1, 35));
    assert_eq!(predict("p0.pop", "alpha: 1 -> f1"), rat(1, 4));
    assert_eq!(predict("p7.pop", "alpha: 2 -> #"), rat(0, 1));
    assert_eq!(predict("p7.pop", "#"), rat(1, 1));
    assert_eq!(predict("p7.pop", "xi: 2 -> f1"), rat(0, 1));
}

#[test]
fn prediction_breakdown() {
    let p = predict_schema_frequency(&fixture("p7.pop"), &parse_schema("alpha: 2 -> #").unwrap());
    assert!(p.zero_by_convention);
    assert!(!p.homologous_exact);
    let q = predict_schema_frequency(&fixture("p0.pop"), &parse_schema("alpha: 1 -> f1").unwrap());
    assert!(q.homologous_exact);
    let json = q.to_json();
    assert_eq!(json["value"], "1/4");
}

#[test]
fn action_values() {
    let p0 = fixture("p0.pop");
    let pay = parse_payoffs("f1 = 1\nf2 = 0\n").unwrap();
    assert_eq!(predict_action_value(&p0, "alpha", &pay).unwrap(), rat(1, 2));
    assert!(matches!(predict_action_value(&p0, "gamma", &pay), Err(Error::ActionAbsent(_))));
    let p7 = fixture("p7.pop");
    let constant = parse_payoffs(&(1..=7).map(|k| format!("f{k} = 3/4\n")).collect::<String>()).unwrap();
    for a in ["alpha", "beta", "gamma", "xi", "pi"] {
        assert_eq!(predict_action_value(&p7, a, &constant).unwrap(), rat(3, 4));
    }
    let partial = parse_payoffs("f1 = 1\n").unwrap();
    assert!(matches!(predict_action_value(&p0, "alpha", &partial), Err(Error::MissingPayoff(_))));
}

#[test]
fn counting() {
    let p7 = fixture("p7.pop");
    assert_eq!(count_matching(&p7, &parse_schema("alpha: 1 -> #").unwrap()), 2);
    assert_eq!(count_matching(&p7, &Schema::Root), 7);
}
