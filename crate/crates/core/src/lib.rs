//! Populations of rollouts under non-homologous crossover.
//!
//! A population is the state of a Markov chain whose moves are the one-point
//! crossover `chi`, the single position swap `nu` and rollout transpositions.
//! The crate computes the long-run frequency of a schema three ways: by
//! simulating the chain ([`mixing`]), by enumerating the orbit exactly
//! ([`orbit`]), and by the closed form ([`prediction`]). [`markov`] holds
//! general finite-chain tools.

pub mod error;
pub mod markov;
pub mod mixing;
pub mod model;
pub mod orbit;
pub mod parse;
pub mod prediction;
pub mod recombination;
pub mod schema;
pub mod statistics;

/// Exact rational used wherever results are compared for equality.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use mixing::{
    count_matching, run_chain, run_nonhomogeneous, uniform_mixing, ChainConfig, FrequencyReport, MixingDistribution,
    Schedule,
};
pub use model::{Letter, Population, PopulationMetrics, Rollout, StateLabel, Symbol, TerminalLabel};
pub use orbit::{
    enumerate_orbit, enumerate_shape_orbit, exact_limit_frequency, orbit_transition_matrix, ExactFrequency,
    OrbitIndex, ShapeOrbit,
};
pub use parse::{parse_op_sequence, parse_payoffs, parse_population, parse_schema};
pub use prediction::{predict_action_value, predict_schema_frequency, PayoffMap, Prediction};
pub use recombination::{
    apply_one_point, apply_sequence, apply_single_swap, apply_transposition, enumerate_generators, RecombOp,
    TransformationSequence,
};
pub use schema::{schema_leq, Schema, Tail};
pub use statistics::{downward, inflate, order_table, DownwardReport, OrderTable};
