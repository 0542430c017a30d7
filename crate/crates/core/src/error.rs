use std::fmt;

/// Position of a parse failure, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },

    #[error("duplicate state label {label} (line {line})")]
    DuplicateState { label: String, line: usize },

    #[error("duplicate terminal label {label} (line {line})")]
    DuplicateTerminal { label: String, line: usize },

    #[error("rollout on line {line} has no states")]
    EmptyRollout { line: usize },

    #[error("population has no rollouts")]
    EmptyPopulation,

    #[error("population is already inflated")]
    AlreadyInflated,

    #[error("rollout index out of range: ({i}, {j}) with population size {size}")]
    IndexOutOfRange { i: usize, j: usize, size: usize },

    #[error("orbit exceeds cap of {cap} populations (frontier of {frontier} pending)")]
    CapExceeded { cap: usize, frontier: usize },

    #[error("action {0} opens no rollout")]
    ActionAbsent(String),

    #[error("no payoff given for terminal {0}")]
    MissingPayoff(String),

    #[error("linear system is singular")]
    Singular,

    #[error("stationary vector has a zero entry at state {0}")]
    ZeroStationaryMass(usize),

    #[error("vector is not stationary (residual {residual:e})")]
    NotStationary { residual: f64 },

    #[error("stationary iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("mixing distribution does not match the orbit: {0}")]
    OrbitMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
