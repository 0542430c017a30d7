//! Finite Markov chain tools: stationary distributions, lumping quotients,
//! generalized transition probabilities, stationary-ratio bounds and
//! contraction rates, over `f64` or exact rationals.

pub mod bounds;
pub mod contraction;
pub mod linalg;
pub mod lumping;
pub mod matrix;
pub mod scalar;
pub mod schedule;
pub mod stationary;

pub use bounds::{markov_inequality_check, ratio_bounds, ratio_inputs, MarkovCheck, RatioInputs};
pub use contraction::{common_reachable_index, composed_contraction_rate, contraction_rate_bound, contraction_ratio};
pub use lumping::{generalized_transition, lump_quotient, two_block_ratio, TwoBlockRatio};
pub use matrix::{
    format_matrix_csv, l1_distance, parse_matrix_csv, parse_matrix_csv_exact, parse_partition, BlockPartition,
    StochasticMatrix,
};
pub use scalar::Scalar;
pub use schedule::{run_matrix_schedule, Cyclic, Fixed, MatrixSchedule, Mixture, ScheduleRun};
pub use stationary::{is_irreducible, power_iterate, stationary_distribution, Stationary};
