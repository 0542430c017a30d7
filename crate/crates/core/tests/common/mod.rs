#![allow(dead_code)]

use std::path::PathBuf;

use geiringer::markov::StochasticMatrix;
use geiringer::{parse_population, Population, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> Population {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_population(&text).expect("fixture parses")
}

pub fn pop(text: &str) -> Population {
    parse_population(text).expect("population parses")
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ACTIONS: [&str; 3] = ["alpha", "beta", "gamma"];
const LETTERS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// Random valid population: 1..=5 rollouts of height 1..=4 over classes
/// 1..=4 and letters a..e, every state and terminal used once.
pub fn random_population<R: Rng>(rng: &mut R) -> Population {
    let mut free: Vec<(u32, &str)> = (1..=4).flat_map(|c| LETTERS.iter().map(move |l| (c, *l))).collect();
    free.shuffle(rng);
    let b = rng.random_range(1..=5);
    let mut text = String::new();
    for k in 0..b {
        let h = rng.random_range(1..=4).min(free.len());
        let states: Vec<String> = free.drain(..h).map(|(c, l)| format!("{c}/{l}")).collect();
        let action = ACTIONS[rng.random_range(0..ACTIONS.len())];
        text.push_str(&format!("{action}: {} -> f{}\n", states.join(", "), k + 1));
    }
    parse_population(&text).expect("generated population is valid")
}

/// Row-stochastic integer weights in 0..=9 with `x → x+1 mod n` forced
/// positive, so the chain is irreducible.
pub fn random_irreducible_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|x| {
            let mut row: Vec<i64> = (0..n).map(|_| rng.random_range(0..=9)).collect();
            row[(x + 1) % n] += 1;
            row
        })
        .collect()
}

pub fn exact_matrix(weights: &[Vec<i64>]) -> StochasticMatrix<Rational> {
    let rows = weights
        .iter()
        .map(|row| {
            let s: i64 = row.iter().sum();
            row.iter().map(|w| rat(*w, s)).collect()
        })
        .collect();
    StochasticMatrix::new(rows).expect("rows sum to one")
}

pub fn float_matrix(weights: &[Vec<i64>]) -> StochasticMatrix<f64> {
    let rows = weights
        .iter()
        .map(|row| {
            let s: i64 = row.iter().sum();
            row.iter().map(|w| *w as f64 / s as f64).collect()
        })
        .collect();
    StochasticMatrix::new(rows).expect("rows sum to one")
}

/// Random partition of `0..n` into between 1 and `n` blocks.
pub fn random_partition_ids<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let k = rng.random_range(1..=n);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Convex combination of random permutation matrices; always doubly
/// stochastic, so the uniform vector is stationary.
pub fn random_doubly_stochastic<R: Rng>(rng: &mut R, n: usize, terms: usize) -> StochasticMatrix<f64> {
    let mut data = vec![vec![0.0; n]; n];
    let weights = random_distribution(rng, terms);
    for w in weights {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (x, &y) in perm.iter().enumerate() {
            data[x][y] += w;
        }
    }
    StochasticMatrix::new(data).expect("doubly stochastic rows")
}
