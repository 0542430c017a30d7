//! The recombination chain on populations and empirical frequencies.
//!
//! Each step draws one generator from a mixing distribution and applies it.
//! `Φ(h)` over `t` populations `X_0..X_{t-1}` is the fraction of rollouts
//! fitting `h`, averaged over the run.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Population;
use crate::recombination::{enumerate_generators, RecombOp};
use crate::schema::Schema;
use crate::Rational;

/// Number of rollouts of `pop` fitting `schema`.
pub fn count_matching(pop: &Population, schema: &Schema) -> usize {
    pop.rollouts().iter().filter(|r| schema.matches(r)).count()
}

/// Probability law over generators, every one with positive weight.
#[derive(Debug, Clone)]
pub struct MixingDistribution {
    ops: Vec<RecombOp>,
    weights: Vec<Rational>,
    sampler: WeightedIndex<f64>,
}

impl PartialEq for MixingDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.ops == other.ops && self.weights == other.weights
    }
}

impl MixingDistribution {
    pub fn new(ops: Vec<RecombOp>, weights: Vec<Rational>) -> Result<Self> {
        if ops.is_empty() || ops.len() != weights.len() {
            return Err(Error::invalid("need one weight per operator"));
        }
        if weights.iter().any(|w| *w <= Rational::zero()) {
            return Err(Error::invalid("weights must be positive"));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = ops.iter().find(|op| !seen.insert(*op)) {
            return Err(Error::invalid(format!("operator {dup} listed twice")));
        }
        let sampler = WeightedIndex::new(weights.iter().map(|w| w.to_f64().unwrap_or(0.0)))
            .map_err(|e| Error::invalid(format!("weights: {e}")))?;
        Ok(MixingDistribution { ops, weights, sampler })
    }

    /// Weights proportional to the given positive integers.
    pub fn proportional(ops: Vec<RecombOp>, raw: &[u64]) -> Result<Self> {
        let total: u64 = raw.iter().sum();
        if total == 0 {
            return Err(Error::invalid("weights must be positive"));
        }
        let weights = raw.iter().map(|w| Rational::new(BigInt::from(*w), BigInt::from(total))).collect();
        Self::new(ops, weights)
    }

    pub fn ops(&self) -> &[RecombOp] {
        &self.ops
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight_of(&self, op: &RecombOp) -> Option<&Rational> {
        self.ops.iter().position(|o| o == op).map(|k| &self.weights[k])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &RecombOp {
        &self.ops[self.sampler.sample(rng)]
    }

    /// Every operator is a generator of `pop`: its states occur in `pop`,
    /// or it is a transposition within range.
    pub fn check_support(&self, pop: &Population) -> Result<()> {
        let all = enumerate_generators(pop, true);
        match self.ops.iter().find(|op| !all.contains(op)) {
            Some(op) => Err(Error::OrbitMismatch(format!("{op} is not a generator of this population"))),
            None => Ok(()),
        }
    }
}

/// Uniform weights over [`enumerate_generators`].
pub fn uniform_mixing(pop: &Population, include_transpositions: bool) -> MixingDistribution {
    let ops = enumerate_generators(pop, include_transpositions);
    let n = ops.len();
    MixingDistribution::proportional(ops, &vec![1; n]).expect("generator list is non-empty and distinct")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainConfig {
    /// Number of populations averaged, `t`.
    pub steps: usize,
    pub seed: u64,
    pub replicas: usize,
    /// Transitions discarded before averaging starts.
    pub burn_in: usize,
    /// Record the running estimate every this many populations (0: never).
    pub trace_every: usize,
}

impl ChainConfig {
    pub fn new(steps: usize, seed: u64, replicas: usize) -> Self {
        ChainConfig { steps, seed, replicas, burn_in: 0, trace_every: 0 }
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 1 || self.replicas < 1 {
            return Err(Error::invalid("steps and replicas must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaEstimate {
    pub schema: String,
    /// Mean of the replica estimates.
    pub phi: f64,
    pub per_replica: Vec<f64>,
    /// Standard error of the mean across replicas (0 for one replica).
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    /// Number of populations averaged so far.
    pub step: usize,
    pub schema_id: usize,
    /// Running estimate, averaged over replicas.
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub config: ChainConfig,
    pub population_size: usize,
    pub estimates: Vec<SchemaEstimate>,
    pub trace: Vec<TracePoint>,
}

/// Random stream for replica `r`: streams `2r` drive generator draws and
/// `2r + 1` drive schedules.
fn replica_rng(seed: u64, replica: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replica as u64 + purpose);
    rng
}

/// Picks which mixing distribution drives each transition.
///
/// Before choosing for the transition out of `X_n`, the runner has shown
/// the schedule `X_0..X_{n-1}` through [`Schedule::observe`]; the choice
/// never sees `X_n` or the generator drawn for it.
pub trait Schedule: Clone + Send + Sync {
    fn observe(&mut self, _pop: &Population) {}

    fn choose(&mut self, step: usize, rng: &mut dyn RngCore) -> usize;
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantSchedule(pub usize);

impl Schedule for ConstantSchedule {
    fn choose(&mut self, _: usize, _: &mut dyn RngCore) -> usize {
        self.0
    }
}

/// `step mod count`.
#[derive(Debug, Clone, Copy)]
pub struct AlternatingSchedule {
    pub count: usize,
}

impl Schedule for AlternatingSchedule {
    fn choose(&mut self, step: usize, _: &mut dyn RngCore) -> usize {
        step % self.count
    }
}

/// Independent uniform choice each step.
#[derive(Debug, Clone, Copy)]
pub struct RandomSchedule {
    pub count: usize,
}

impl Schedule for RandomSchedule {
    fn choose(&mut self, _: usize, rng: &mut dyn RngCore) -> usize {
        rng.random_range(0..self.count)
    }
}

/// Number of populations seen so far equal to `X_0`, modulo `count`.
#[derive(Debug, Clone)]
pub struct ReturnCountSchedule {
    pub count: usize,
    start: Option<Population>,
    returns: usize,
}

impl ReturnCountSchedule {
    pub fn new(count: usize) -> Self {
        ReturnCountSchedule { count, start: None, returns: 0 }
    }
}

impl Schedule for ReturnCountSchedule {
    fn observe(&mut self, pop: &Population) {
        match &self.start {
            None => {
                self.start = Some(pop.clone());
                self.returns = 1;
            }
            Some(x0) if x0 == pop => self.returns += 1,
            Some(_) => {}
        }
    }

    fn choose(&mut self, _: usize, _: &mut dyn RngCore) -> usize {
        self.returns % self.count
    }
}

struct ReplicaResult {
    phi: Vec<f64>,
    trace: Vec<(usize, Vec<f64>)>,
}

fn run_replica<S: Schedule>(
    pop: &Population,
    distributions: &[MixingDistribution],
    mut schedule: S,
    config: &ChainConfig,
    schemata: &[Schema],
    replica: usize,
) -> Result<ReplicaResult> {
    let mut draws = replica_rng(config.seed, replica, 0);
    let mut choices = replica_rng(config.seed, replica, 1);
    let b = pop.size() as f64;
    let mut x = pop.clone();
    let mut counts = vec![0u64; schemata.len()];
    let mut trace = Vec::new();
    let total = config.burn_in + config.steps;
    for n in 0..total {
        if n >= config.burn_in {
            for (c, h) in counts.iter_mut().zip(schemata) {
                *c += count_matching(&x, h) as u64;
            }
            let seen = n + 1 - config.burn_in;
            if config.trace_every > 0 && (seen % config.trace_every == 0 || seen == config.steps) {
                trace.push((seen, counts.iter().map(|c| *c as f64 / (b * seen as f64)).collect()));
            }
        }
        if n + 1 == total {
            break;
        }
        let k = schedule.choose(n, &mut choices);
        let mu = distributions.get(k).ok_or_else(|| {
            Error::invalid(format!("schedule chose distribution {k} of {}", distributions.len()))
        })?;
        schedule.observe(&x);
        mu.sample(&mut draws).apply_in_place(&mut x)?;
    }
    let t = config.steps as f64;
    Ok(ReplicaResult { phi: counts.iter().map(|c| *c as f64 / (b * t)).collect(), trace })
}

fn aggregate(
    pop: &Population,
    config: ChainConfig,
    schemata: &[Schema],
    replicas: Vec<ReplicaResult>,
) -> FrequencyReport {
    let r = replicas.len() as f64;
    let estimates = schemata
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let per_replica: Vec<f64> = replicas.iter().map(|rep| rep.phi[k]).collect();
            let phi = per_replica.iter().sum::<f64>() / r;
            let std_error = if replicas.len() > 1 {
                let var = per_replica.iter().map(|v| (v - phi).powi(2)).sum::<f64>() / (r - 1.0);
                (var / r).sqrt()
            } else {
                0.0
            };
            SchemaEstimate { schema: h.to_string(), phi, per_replica, std_error }
        })
        .collect();
    let mut trace = Vec::new();
    if let Some(first) = replicas.first() {
        for (i, (step, _)) in first.trace.iter().enumerate() {
            for k in 0..schemata.len() {
                let phi = replicas.iter().map(|rep| rep.trace[i].1[k]).sum::<f64>() / r;
                trace.push(TracePoint { step: *step, schema_id: k, phi });
            }
        }
    }
    FrequencyReport { config, population_size: pop.size(), estimates, trace }
}

/// Homogeneous chain: every step draws from `mu`.
pub fn run_chain(
    pop: &Population,
    mu: &MixingDistribution,
    config: ChainConfig,
    schemata: &[Schema],
) -> Result<FrequencyReport> {
    run_nonhomogeneous(pop, std::slice::from_ref(mu), ConstantSchedule(0), config, schemata)
}

/// Chain whose mixing distribution at each step is picked by `schedule`.
/// Each replica gets its own copy of the schedule.
pub fn run_nonhomogeneous<S: Schedule>(
    pop: &Population,
    distributions: &[MixingDistribution],
    schedule: S,
    config: ChainConfig,
    schemata: &[Schema],
) -> Result<FrequencyReport> {
    config.validate()?;
    if distributions.is_empty() {
        return Err(Error::invalid("no mixing distributions"));
    }
    for mu in distributions {
        mu.check_support(pop)?;
    }
    let replicas = (0..config.replicas)
        .into_par_iter()
        .map(|r| run_replica(pop, distributions, schedule.clone(), &config, schemata, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(pop, config, schemata, replicas))
}

/// Heights of every rollout of `X_0..X_{steps-1}` along one trajectory.
pub fn sample_rollout_heights(pop: &Population, mu: &MixingDistribution, steps: usize, seed: u64) -> Result<Vec<usize>> {
    mu.check_support(pop)?;
    let mut rng = replica_rng(seed, 0, 0);
    let mut x = pop.clone();
    let mut out = Vec::with_capacity(steps * pop.size());
    for n in 0..steps {
        out.extend(x.heights());
        if n + 1 < steps {
            mu.sample(&mut rng).apply_in_place(&mut x)?;
        }
    }
    Ok(out)
}
