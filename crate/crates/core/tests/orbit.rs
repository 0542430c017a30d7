//! Orbit sizes and exact frequencies frozen from an independent brute-force
//! enumeration.

mod common;

use geiringer::orbit::{enumerate_shape_orbit, DEFAULT_CAP};
use geiringer::{
    enumerate_orbit, exact_limit_frequency, inflate, orbit_transition_matrix, parse_schema, predict_schema_frequency,
    uniform_mixing, Error, MixingDistribution, RecombOp,
};
use num_bigint::BigUint;
use num_traits::One;

use common::*;

fn inflated(name: &str, m: u32) -> geiringer::Population {
    let p = fixture(name);
    if m == 1 {
        p
    } else {
        inflate(&p, m).unwrap()
    }
}

#[test]
fn labeled_orbit_sizes() {
    for (name, m, trans, size) in [
        ("p0.pop", 1, false, 4),
        ("p0.pop", 1, true, 8),
        ("p0.pop", 2, false, 576),
        ("p0.pop", 2, true, 3456),
        ("p1.pop", 1, false, 12),
        ("p1.pop", 1, true, 24),
        ("p1.pop", 2, false, 62208),
    ] {
        let o = enumerate_orbit(&inflated(name, m), trans, DEFAULT_CAP).unwrap();
        assert_eq!(o.len(), size, "{name} m={m} trans={trans}");
        assert_eq!(o.layers().iter().sum::<usize>(), size);
    }
}

#[test]
fn shape_orbit_sizes() {
    for (name, m, shapes) in [("p0.pop", 1, 2), ("p0.pop", 2, 24), ("p0.pop", 3, 720), ("p1.pop", 1, 3), ("p1.pop", 2, 108), ("p1.pop", 3, 10800)] {
        let o = enumerate_shape_orbit(&inflated(name, m), false, DEFAULT_CAP).unwrap();
        assert_eq!(o.len(), shapes, "{name} m={m}");
    }
    let t = enumerate_shape_orbit(&inflated("p1.pop", 2), true, DEFAULT_CAP).unwrap();
    assert_eq!(t.labeled_size(), BigUint::from(373_248u32));
}

#[test]
fn frozen_frequencies() {
    let cases = [
        ("p0.pop", "alpha: 1 -> f1", [rat(1, 4), rat(1, 4), rat(1, 4)]),
        ("p0.pop", "alpha: 1 -> #", [rat(1, 2), rat(1, 2), rat(1, 2)]),
        ("p1.pop", "alpha: 1 -> #", [rat(1, 2), rat(1, 2), rat(1, 2)]),
        ("p1.pop", "alpha: 1, 2 -> f1", [rat(1, 6), rat(7, 54), rat(19, 150)]),
    ];
    for (name, h, values) in cases {
        let h = parse_schema(h).unwrap();
        for (m, want) in (1..=3).zip(values) {
            let o = enumerate_shape_orbit(&inflated(name, m), false, DEFAULT_CAP).unwrap();
            let f = o.exact_frequency(&h);
            assert_eq!(f.value, want, "{name} {h} m={m}");
        }
    }
    assert_eq!(predict_schema_frequency(&fixture("p1.pop"), &parse_schema("alpha: 1, 2 -> f1").unwrap()).value, rat(1, 8));
}

#[test]
fn transpositions_do_not_change_frequencies() {
    for name in ["p0.pop", "p1.pop"] {
        let p = fixture(name);
        let a = enumerate_orbit(&p, false, DEFAULT_CAP).unwrap();
        let b = enumerate_orbit(&p, true, DEFAULT_CAP).unwrap();
        for h in ["#", "alpha: 1 -> #", "alpha: 1 -> f1", "beta: 1 -> f1", "alpha: 1, 2 -> f1", "beta: 2, 1 -> #"] {
            let h = parse_schema(h).unwrap();
            let fb = exact_limit_frequency(&b, &h);
            assert!(fb.consistent());
            assert_eq!(exact_limit_frequency(&a, &h).value, fb.value, "{name} {h}");
        }
    }
}

#[test]
fn root_schema_has_frequency_one() {
    let o = enumerate_orbit(&fixture("p1.pop"), true, DEFAULT_CAP).unwrap();
    assert!(exact_limit_frequency(&o, &geiringer::Schema::Root).value.is_one());
}

#[test]
fn cap_is_reported() {
    let err = enumerate_orbit(&fixture("p0.pop"), true, 1).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { cap: 1, .. }), "{err}");
}

#[test]
fn orbit_is_deterministic() {
    let p = fixture("p1.pop");
    let a = enumerate_orbit(&p, true, DEFAULT_CAP).unwrap();
    let b = enumerate_orbit(&p, true, DEFAULT_CAP).unwrap();
    let pa: Vec<_> = a.populations().collect();
    let pb: Vec<_> = b.populations().collect();
    assert_eq!(pa, pb);
    assert_eq!(a.index_of(&p), Some(0));
}

#[test]
fn transition_matrix_examples() {
    let p0 = fixture("p0.pop");
    let o = enumerate_orbit(&p0, false, DEFAULT_CAP).unwrap();
    let mu = uniform_mixing(&p0, false);
    let m = orbit_transition_matrix(&o, &mu).unwrap();
    assert_eq!(m.dim(), 4);
    assert!(m.row_sums().iter().all(One::is_one));
    assert!(m.column_sums().iter().all(One::is_one));
    for x in 0..4 {
        assert!(*m.get(x, x) >= rat(1, 3));
    }

    let id = MixingDistribution::proportional(vec![RecombOp::Identity], &[1]).unwrap();
    let m = orbit_transition_matrix(&o, &id).unwrap();
    assert_eq!(m, geiringer::markov::StochasticMatrix::identity(4));

    let foreign = uniform_mixing(&fixture("p1.pop"), false);
    assert!(matches!(orbit_transition_matrix(&o, &foreign), Err(Error::OrbitMismatch(_))));
}
