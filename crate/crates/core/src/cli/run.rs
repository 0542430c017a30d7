use std::fs;
use std::io::Write;
use std::path::Path;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};

use geiringer::markov::{self, BlockPartition, StochasticMatrix};
use geiringer::mixing::{
    run_nonhomogeneous, AlternatingSchedule, ChainConfig, ConstantSchedule, FrequencyReport, MixingDistribution,
    RandomSchedule, ReturnCountSchedule,
};
use geiringer::orbit::{enumerate_orbit, enumerate_shape_orbit, exact_limit_frequency, ExactFrequency};
use geiringer::statistics::stats_json;
use geiringer::{
    inflate, parse_op_sequence, parse_payoffs, parse_population, parse_schema, predict_action_value,
    predict_schema_frequency, uniform_mixing, Error, Population, Rational, Result, Schema,
};

use super::args::*;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_population(path: &Path) -> Result<Population> {
    parse_population(&read(path)?)
}

fn load_schemata(texts: &[String]) -> Result<Vec<Schema>> {
    texts.iter().map(|t| parse_schema(t)).collect()
}

fn maybe_inflate(pop: Population, m: Option<u32>) -> Result<Population> {
    match m {
        Some(m) => inflate(&pop, m),
        None => Ok(pop),
    }
}

fn rational_json(r: &Rational) -> Value {
    json!({ "value": r.to_string(), "decimal": r.to_f64() })
}

fn envelope(command: &str, config: &impl Serialize, result: Value) -> Value {
    json!({ "command": command, "config": config, "result": result })
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

pub fn run(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate(a) => {
            let pop = load_population(&a.population)?;
            let result = json!({
                "valid": true,
                "metrics": pop.metrics(),
                "inflated": pop.is_inflated(),
            });
            emit(out, &envelope("validate", a, result))
        }
        Command::Stats(a) => {
            let pop = load_population(&a.population)?;
            emit(out, &envelope("stats", a, stats_json(&pop)))
        }
        Command::Predict(a) => {
            let pop = load_population(&a.population)?;
            let rows: Vec<Value> = load_schemata(&a.schemata)?
                .iter()
                .map(|h| json!({ "schema": h.to_string(), "prediction": predict_schema_frequency(&pop, h).to_json() }))
                .collect();
            emit(out, &envelope("predict", a, json!(rows)))
        }
        Command::Evaluate(a) => {
            let pop = load_population(&a.population)?;
            let payoffs = parse_payoffs(&read(&a.payoffs)?)?;
            let v = predict_action_value(&pop, &a.action, &payoffs)?;
            let result = json!({
                "action": a.action,
                "value": rational_json(&v),
                "note": "start classes weighted by Order(action -> class) among rollouts opened by the action",
            });
            emit(out, &envelope("evaluate", a, result))
        }
        Command::Apply(a) => {
            let pop = load_population(&a.population)?;
            let seq = parse_op_sequence(&a.ops)?;
            let image = seq.apply(&pop)?;
            let result = json!({
                "ops": seq.to_string(),
                "population": image.to_string().lines().collect::<Vec<_>>(),
            });
            emit(out, &envelope("apply", a, result))
        }
        Command::Mix(a) => mix(a, out),
        Command::Orbit(a) => orbit(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Analyze(c) => analyze(c, out),
    }
}

fn chain_config(c: &ChainArgs, trace_every: usize) -> ChainConfig {
    ChainConfig { steps: c.steps, seed: c.seed, replicas: c.replicas, burn_in: c.burn_in, trace_every }
}

/// Same generators as the uniform law, with half the mass on the identity.
fn lazy_mixing(uniform: &MixingDistribution) -> MixingDistribution {
    let n = uniform.ops().len() as u64;
    if n == 1 {
        return uniform.clone();
    }
    let raw: Vec<u64> = (0..n).map(|k| if k == 0 { n - 1 } else { 1 }).collect();
    MixingDistribution::proportional(uniform.ops().to_vec(), &raw).expect("distinct generators, positive weights")
}

fn run_mix(pop: &Population, trans: bool, kind: ScheduleKind, cfg: ChainConfig, hs: &[Schema]) -> Result<FrequencyReport> {
    let uniform = uniform_mixing(pop, trans);
    if kind == ScheduleKind::None {
        return run_nonhomogeneous(pop, std::slice::from_ref(&uniform), ConstantSchedule(0), cfg, hs);
    }
    let family = [uniform.clone(), lazy_mixing(&uniform)];
    match kind {
        ScheduleKind::None => unreachable!(),
        ScheduleKind::Alternating => run_nonhomogeneous(pop, &family, AlternatingSchedule { count: 2 }, cfg, hs),
        ScheduleKind::Random => run_nonhomogeneous(pop, &family, RandomSchedule { count: 2 }, cfg, hs),
        ScheduleKind::ReturnParity => run_nonhomogeneous(pop, &family, ReturnCountSchedule::new(2), cfg, hs),
    }
}

fn mix(a: &MixArgs, out: &mut dyn Write) -> Result<()> {
    let pop = maybe_inflate(load_population(&a.population)?, a.inflate)?;
    let schemata = load_schemata(&a.schemata)?;
    let cfg = chain_config(&a.chain, a.trace_every);
    let report = run_mix(&pop, a.include_transpositions, a.schedule, cfg, &schemata)?;
    match a.out {
        OutputFormat::Json => {
            let result = serde_json::to_value(&report).map_err(|e| Error::Io(e.into()))?;
            emit(out, &envelope("mix", a, result))
        }
        OutputFormat::Csv => {
            writeln!(out, "step,schema_id,phi")?;
            for p in &report.trace {
                writeln!(out, "{},{},{}", p.step, p.schema_id, p.phi)?;
            }
            if report.trace.is_empty() {
                for (k, e) in report.estimates.iter().enumerate() {
                    writeln!(out, "{},{},{}", report.config.steps, k, e.phi)?;
                }
            }
            Ok(())
        }
    }
}

fn frequency_json(schema: &Schema, f: &ExactFrequency) -> Value {
    json!({
        "schema": schema.to_string(),
        "frequency": f.value.to_string(),
        "decimal": f.value.to_f64(),
        "first_slot": f.first_slot.as_ref().map(ToString::to_string),
        "consistent": f.consistent(),
    })
}

fn orbit(a: &OrbitArgs, out: &mut dyn Write) -> Result<()> {
    let pop = maybe_inflate(load_population(&a.population)?, a.inflate)?;
    let schemata = load_schemata(&a.schemata)?;
    let result = if a.shapes {
        let o = enumerate_shape_orbit(&pop, a.include_transpositions, a.cap)?;
        json!({
            "orbit_size": o.labeled_size().to_string(),
            "shapes": o.len(),
            "layers": o.layers(),
            "frequencies": schemata.iter().map(|h| frequency_json(h, &o.exact_frequency(h))).collect::<Vec<_>>(),
        })
    } else {
        let o = enumerate_orbit(&pop, a.include_transpositions, a.cap)?;
        json!({
            "orbit_size": o.len(),
            "generators": o.generators().len(),
            "layers": o.layers(),
            "frequencies": schemata.iter().map(|h| frequency_json(h, &exact_limit_frequency(&o, h))).collect::<Vec<_>>(),
        })
    };
    emit(out, &envelope("orbit", a, result))
}

fn compare(a: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let base = load_population(&a.population)?;
    let schemata = load_schemata(&a.schemata)?;
    if a.max_inflate < 1 {
        return Err(Error::InvalidArgument("--max-inflate must be at least 1".into()));
    }
    let predictions: Vec<_> = schemata.iter().map(|h| predict_schema_frequency(&base, h)).collect();
    let mut rows = Vec::new();
    for m in 1..=a.max_inflate {
        let pop = if m == 1 { base.clone() } else { inflate(&base, m)? };
        let exact: std::result::Result<Vec<ExactFrequency>, String> = if a.full_orbit {
            match enumerate_orbit(&pop, a.include_transpositions, a.cap) {
                Ok(o) => Ok(schemata.iter().map(|h| exact_limit_frequency(&o, h)).collect()),
                Err(e @ Error::CapExceeded { .. }) => Err(e.to_string()),
                Err(e) => return Err(e),
            }
        } else {
            match enumerate_shape_orbit(&pop, a.include_transpositions, a.cap) {
                Ok(o) => Ok(schemata.iter().map(|h| o.exact_frequency(h)).collect()),
                Err(e @ Error::CapExceeded { .. }) => Err(e.to_string()),
                Err(e) => return Err(e),
            }
        };
        let chain = run_mix(&pop, a.include_transpositions, ScheduleKind::None, chain_config(&a.chain, 0), &schemata)?;
        for (k, h) in schemata.iter().enumerate() {
            let pred = &predictions[k].value;
            let (exact_v, error, note) = match &exact {
                Ok(fs) => {
                    let e = (&fs[k].value - pred).abs();
                    (Some(fs[k].value.clone()), e.to_f64(), None)
                }
                Err(msg) => (None, None, Some(msg.clone())),
            };
            rows.push(json!({
                "schema": h.to_string(),
                "m": m,
                "prediction": pred.to_string(),
                "prediction_decimal": pred.to_f64(),
                "exact": exact_v.as_ref().map(ToString::to_string),
                "exact_decimal": exact_v.as_ref().and_then(ToPrimitive::to_f64),
                "exact_error": error,
                "orbit_note": note,
                "chain_phi": chain.estimates[k].phi,
                "chain_std_error": chain.estimates[k].std_error,
            }));
        }
    }
    match a.out {
        OutputFormat::Json => emit(out, &envelope("compare", a, json!(rows))),
        OutputFormat::Csv => {
            writeln!(out, "schema,m,prediction,exact,exact_error,chain_phi,chain_std_error")?;
            for r in &rows {
                let cell = |k: &str| match &r[k] {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                };
                writeln!(
                    out,
                    "\"{}\",{},{},{},{},{},{}",
                    cell("schema"),
                    cell("m"),
                    cell("prediction"),
                    cell("exact"),
                    cell("exact_error"),
                    cell("chain_phi"),
                    cell("chain_std_error")
                )?;
            }
            Ok(())
        }
    }
}

fn vector_json<T: markov::Scalar>(v: &[T]) -> Value {
    if T::EXACT {
        json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
    } else {
        json!(v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>())
    }
}

fn matrix_json<T: markov::Scalar>(m: &StochasticMatrix<T>) -> Value {
    json!(m.rows().iter().map(|r| vector_json(r)).collect::<Vec<_>>())
}

fn stationary_report<T: markov::Scalar>(m: &StochasticMatrix<T>) -> Result<Value> {
    let s = markov::stationary_distribution(m)?;
    Ok(json!({
        "mode": markov::scalar::mode_name::<T>(),
        "pi": vector_json(&s.pi),
        "irreducible": s.irreducible,
        "unique": s.unique,
        "residual": s.residual,
    }))
}

fn lump_report<T: markov::Scalar>(m: &StochasticMatrix<T>, partition: &BlockPartition) -> Result<Value> {
    let s = markov::stationary_distribution(m)?;
    let q = markov::lump_quotient(m, &s.pi, partition)?;
    let block_pi = partition.block_sums(&s.pi);
    Ok(json!({
        "mode": markov::scalar::mode_name::<T>(),
        "quotient": matrix_json(&q),
        "block_pi": vector_json(&block_pi),
        "quotient_residual": markov::stationary::residual(&q, &block_pi),
    }))
}

fn ratio_report<T: markov::Scalar>(m: &StochasticMatrix<T>, set: &[usize]) -> Result<Value> {
    let s = markov::stationary_distribution(m)?;
    let r = markov::two_block_ratio(m, &s.pi, set)?;
    Ok(json!({
        "mode": markov::scalar::mode_name::<T>(),
        "ratio": vector_json(std::slice::from_ref(&r.ratio))[0],
        "stationary_ratio": vector_json(std::slice::from_ref(&r.stationary_ratio))[0],
    }))
}

fn analyze(c: &AnalyzeCommand, out: &mut dyn Write) -> Result<()> {
    let load = |p: &Path| -> Result<StochasticMatrix<f64>> { markov::parse_matrix_csv(&read(p)?) };
    let load_exact = |p: &Path| -> Result<StochasticMatrix<Rational>> { markov::parse_matrix_csv_exact(&read(p)?) };
    let result = match c {
        AnalyzeCommand::Stationary(a) => {
            if a.exact {
                stationary_report(&load_exact(&a.matrix)?)?
            } else {
                stationary_report(&load(&a.matrix)?)?
            }
        }
        AnalyzeCommand::Lump { matrix, partition } => {
            let part = markov::parse_partition(&read(partition)?)?;
            if matrix.exact {
                lump_report(&load_exact(&matrix.matrix)?, &part)?
            } else {
                lump_report(&load(&matrix.matrix)?, &part)?
            }
        }
        AnalyzeCommand::Ratio { matrix, set, rare } => {
            let mut v = if matrix.exact {
                ratio_report(&load_exact(&matrix.matrix)?, set)?
            } else {
                ratio_report(&load(&matrix.matrix)?, set)?
            };
            if !rare.is_empty() {
                let m = load(&matrix.matrix)?;
                let pi = markov::stationary_distribution(&m)?.pi;
                let inputs = markov::ratio_inputs(&m, set, rare)?;
                let in_a: Vec<bool> = (0..m.dim()).map(|x| set.contains(&x)).collect();
                let share = |side: bool| {
                    let total: f64 = (0..m.dim()).filter(|&x| in_a[x] == side).map(|x| pi[x]).sum();
                    let rare_mass: f64 = rare.iter().filter(|&&x| in_a[x] == side).map(|&x| pi[x]).sum();
                    rare_mass / total
                };
                let (lo, hi) = markov::ratio_bounds(inputs, share(true), share(false))?;
                v["bounds"] = json!({ "inputs": inputs, "epsilon": share(true), "delta": share(false), "lower": lo, "upper": hi });
            }
            v
        }
        AnalyzeCommand::Contraction(a) => {
            if a.exact {
                let m = load_exact(&a.matrix)?;
                json!({ "mode": "rational", "min_entry": m.min_entry().to_string(), "rate": markov::contraction_rate_bound(&m).to_string() })
            } else {
                let m = load(&a.matrix)?;
                json!({ "mode": "float", "min_entry": m.min_entry(), "rate": markov::contraction_rate_bound(&m) })
            }
        }
        AnalyzeCommand::ReachableIndex { matrices, k_max } => {
            let family = matrices.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            json!({ "index": markov::common_reachable_index(&family, *k_max), "k_max": k_max })
        }
        AnalyzeCommand::Schedule { matrices, steps, x0, mixture, out: format } => {
            let family = matrices.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            let n = family[0].dim();
            let x0 = if x0.is_empty() {
                let mut v = vec![0.0; n];
                v[0] = 1.0;
                v
            } else {
                x0.clone()
            };
            let run = if *mixture {
                let w = vec![1.0 / family.len() as f64; family.len()];
                markov::run_matrix_schedule(&family, &mut markov::Mixture(w), &x0, *steps)?
            } else {
                markov::run_matrix_schedule(&family, &mut markov::Cyclic, &x0, *steps)?
            };
            if *format == OutputFormat::Csv {
                writeln!(out, "step,distance")?;
                for (t, d) in run.distances.iter().enumerate() {
                    writeln!(out, "{t},{d}")?;
                }
                return Ok(());
            }
            json!({ "pi": run.pi, "distances": run.distances })
        }
    };
    emit(out, &envelope("analyze", c, result))
}
