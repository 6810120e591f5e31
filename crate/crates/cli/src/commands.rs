use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use tbcodes::circuits::{build_memory_circuit, parse, serialize, Circuit, NoiseModel};
use tbcodes::codes::{build_code, estimate_distance, named_code, Distance};
use tbcodes::harness::{
    fit_rate_scaling, read_results_csv, run_memory_experiment, write_results_csv, SearchConfig, ShotDecoder,
};
use tbcodes::logicals::{logical_basis, parse_gate_sequence, verify_logical_basis, verify_logical_gate, LogicalCliffordName};
use tbcodes::sim::{extract_dem, sample, ShotMatrix};
use tbcodes::{Error, ExperimentResult, LogicalBasis, Result, StabilizerCode, TBCodeSpec};

use crate::{CodeArg, Command};

/// `println!` that reports write errors (a closed pipe) instead of panicking.
macro_rules! say {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)?
    };
}

/// Trials used to fill in an unknown distance when it sets the round count.
const ROUNDS_DISTANCE_TRIALS: usize = 1000;

fn load_code(arg: &CodeArg) -> Result<StabilizerCode> {
    match (&arg.code, &arg.spec) {
        (Some(name), _) => named_code(name),
        (None, Some(path)) => build_code(&TBCodeSpec::from_json(&fs::read_to_string(path)?)?),
        (None, None) => Err(Error::Validation("one of --code or --spec is required".into())),
    }
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse(&fs::read_to_string(path)?)
}

fn load_basis(code: &StabilizerCode, path: Option<&Path>) -> Result<LogicalBasis> {
    match path {
        Some(p) => LogicalBasis::from_text(code.n, &fs::read_to_string(p)?),
        None => Ok(logical_basis(code)),
    }
}

fn default_rounds(code: &StabilizerCode, rounds: Option<usize>) -> Result<usize> {
    if let Some(r) = rounds {
        return Ok(r);
    }
    match code.distance {
        Some(d) => Ok(d.value),
        None => Ok(estimate_distance(code, ROUNDS_DISTANCE_TRIALS, 0)?.upper_bound),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn print_json(v: &Value) -> Result<()> {
    say!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
    Ok(())
}

fn distance_json(d: Option<Distance>) -> Value {
    d.map_or(Value::Null, |d| json!({ "value": d.value, "exact": d.exact }))
}

fn result_json(r: &ExperimentResult) -> Value {
    serde_json::to_value(r).expect("results serialize")
}

pub fn run(cmd: Command, as_json: bool) -> Result<()> {
    match cmd {
        Command::Construct { code, print_stabilizers } => {
            let code = load_code(&code)?;
            let (zs, xs) = code.stabilizer_strings();
            if as_json {
                print_json(&json!({
                    "name": code.name,
                    "n": code.n,
                    "k": code.k,
                    "distance": distance_json(code.distance),
                    "spec": code.spec().map(|s| serde_json::to_value(s).expect("specs serialize")),
                    "stabilizers": { "z": zs, "x": xs },
                }))?;
                return Ok(());
            }
            say!("{} {}", code.name, code.parameters());
            if print_stabilizers {
                for (i, s) in zs.iter().enumerate() {
                    say!("S_Z{} = {s}", i + 1);
                }
                for (i, s) in xs.iter().enumerate() {
                    say!("S_X{} = {s}", i + 1);
                }
            }
        }
        Command::Distance { code, trials, seed } => {
            let code = load_code(&code)?;
            let est = estimate_distance(&code, trials, seed)?;
            if as_json {
                print_json(&json!({ "d": est.upper_bound, "exact": est.exact }))?;
            } else {
                say!("d={} exact={}", est.upper_bound, est.exact);
            }
        }
        Command::Logicals { code, logicals } => {
            let code = load_code(&code)?;
            let basis = load_basis(&code, logicals.as_deref())?;
            if logicals.is_some() {
                let valid = verify_logical_basis(&code, &basis)?;
                if as_json {
                    print_json(&json!({ "valid": valid }))?;
                } else {
                    say!("valid={valid}");
                }
                if !valid {
                    return Err(Error::Validation("not a logical basis of the code".into()));
                }
                return Ok(());
            }
            if as_json {
                let pairs: Vec<Value> = (0..basis.k())
                    .map(|i| json!({ "x": basis.x(i).to_string(), "z": basis.z(i).to_string() }))
                    .collect();
                print_json(&json!({ "k": basis.k(), "logicals": pairs }))?;
            } else {
                for i in 0..basis.k() {
                    say!("{} ; {}", basis.x(i), basis.z(i));
                }
            }
        }
        Command::Circuit { code, rounds, p, basis, out } => {
            let code = load_code(&code)?;
            let rounds = default_rounds(&code, rounds)?;
            let lb = logical_basis(&code);
            let c = build_memory_circuit(&code, &lb, rounds, NoiseModel::new(p)?, basis)?;
            write_or_print(out.as_deref(), &serialize(&c))?;
        }
        Command::Sample { circuit, shots, seed, out } => {
            let c = load_circuit(&circuit)?;
            let s = sample(&c, shots, seed)?;
            fs::write(&out, s.to_b8())?;
            if as_json {
                print_json(&json!({
                    "shots": shots,
                    "detectors": s.num_detectors,
                    "observables": s.num_observables,
                }))?;
            } else {
                say!("shots={shots} detectors={} observables={}", s.num_detectors, s.num_observables);
            }
        }
        Command::Dem { circuit, out } => {
            let dem = extract_dem::<f64>(&load_circuit(&circuit)?)?;
            write_or_print(out.as_deref(), &dem.to_text())?;
        }
        Command::Decode { circuit, shots, out, graph_out } => {
            let c = load_circuit(&circuit)?;
            let s = ShotMatrix::from_b8(&fs::read(&shots)?, c.num_detectors(), c.num_observables())?;
            let decoder = ShotDecoder::<f64>::new(&c)?;
            if let Some(p) = graph_out {
                fs::write(p, decoder.graph().to_text())?;
            }
            let mut rows = String::from("shot,predicted,measured,failed\n");
            let mut failures = 0;
            for shot in 0..s.shots() {
                let (pred, actual, failed) = match decoder.decode(&s, shot) {
                    Ok((p, a)) => (p.to_string(), a.to_string(), p != a),
                    Err(_) => (String::new(), String::new(), true),
                };
                failures += failed as usize;
                rows.push_str(&format!("{shot},{pred},{actual},{}\n", failed as u8));
            }
            if let Some(p) = out {
                fs::write(p, rows)?;
            }
            if as_json {
                print_json(&json!({ "shots": s.shots(), "failures": failures }))?;
            } else {
                say!("shots={} failures={failures}", s.shots());
            }
        }
        Command::Memory { code, p, shots, rounds, seed, csv } => {
            let code = load_code(&code)?;
            let rounds = default_rounds(&code, rounds)?;
            let rows: Vec<ExperimentResult> = p
                .iter()
                .map(|&p| run_memory_experiment(&code, NoiseModel::new(p)?, rounds, shots, seed))
                .collect::<Result<_>>()?;
            if let Some(path) = csv {
                write_results_csv(fs::File::create(path)?, &rows)?;
            }
            if as_json {
                print_json(&Value::Array(rows.iter().map(result_json).collect()))?;
            } else {
                for r in &rows {
                    say!(
                        "code={} rounds={} p_phys={} shots={} failures={} p_l={:.4e} ci=[{:.4e}, {:.4e}]",
                        r.code, r.rounds, r.p_phys, r.shots, r.failures, r.p_l, r.ci_lo, r.ci_hi
                    );
                }
            }
        }
        Command::Search { l, m, w_a, w_b, max_power, trials, distance_trials, min_k, min_d, seed, limit } => {
            let cfg = SearchConfig { l, m, w_a, w_b, max_power, trials, seed, distance_trials };
            let mut hits = tbcodes::harness::random_code_search(&cfg, |k, d| k >= min_k && d >= min_d)?;
            hits.truncate(limit);
            if as_json {
                print_json(&serde_json::to_value(&hits).expect("hits serialize"))?;
            } else {
                for h in &hits {
                    let d = if h.distance.exact { h.distance.upper_bound.to_string() } else { format!("<={}", h.distance.upper_bound) };
                    say!("[[{},{},{d}]] {}", h.n, h.k, h.spec.to_json());
                }
            }
        }
        Command::Fit { csv } => {
            let rows: Vec<ExperimentResult> = read_results_csv(fs::File::open(csv)?)?;
            let mut seen = BTreeSet::new();
            let mut points = Vec::new();
            for r in &rows {
                let d = r
                    .d
                    .ok_or_else(|| Error::Validation(format!("row for {} has no distance", r.code)))?;
                if seen.insert(r.code.clone()) {
                    points.push((d as f64, r.k as f64 / r.n as f64));
                }
            }
            let fit = fit_rate_scaling(&points)?;
            if as_json {
                print_json(&json!({
                    "alpha": fit.alpha,
                    "beta": fit.beta,
                    "residual": fit.residual,
                    "points": points.len(),
                }))?;
            } else {
                say!("alpha={:.6} beta={:.6} residual={:.3e} points={}", fit.alpha, fit.beta, fit.residual, points.len());
            }
        }
        Command::VerifyGate { code, gates, claim, logicals } => {
            let code = load_code(&code)?;
            let basis = load_basis(&code, logicals.as_deref())?;
            let seq = parse_gate_sequence(&fs::read_to_string(gates)?)?;
            let claim: LogicalCliffordName = claim.parse()?;
            let r = verify_logical_gate(&code, &basis, &seq, claim)?;
            let names: Vec<String> = (1..=basis.k())
                .map(|i| format!("X_L{i}"))
                .chain((1..=basis.k()).map(|i| format!("Z_L{i}")))
                .collect();
            if as_json {
                let images: Vec<Value> = names
                    .iter()
                    .zip(&r.logical_images)
                    .map(|(n, p)| json!({ "logical": n, "image": p.to_string() }))
                    .collect();
                print_json(&json!({
                    "claim": claim.to_string(),
                    "stabilizers_preserved": r.stabilizers_preserved,
                    "logicals_well_defined": r.logicals_well_defined,
                    "matches": r.matches,
                    "images": images,
                }))?;
            } else {
                say!("claim={claim}");
                say!("stabilizers_preserved={}", r.stabilizers_preserved);
                say!("logicals_well_defined={}", r.logicals_well_defined);
                say!("matches={}", r.matches);
                for (n, p) in names.iter().zip(&r.logical_images) {
                    say!("{n} -> {p}");
                }
            }
            if !(r.stabilizers_preserved && r.logicals_well_defined && r.matches) {
                return Err(Error::Validation(format!("sequence does not implement {claim}")));
            }
        }
    }
    Ok(())
}
