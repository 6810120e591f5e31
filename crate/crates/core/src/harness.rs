//! Memory experiments, logical error statistics, rate-scaling fits and
//! randomized code search.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::circuits::{build_memory_circuit, Circuit};
use crate::codes::{build_code, estimate_distance, Axis, DistanceEstimate, Monomial, StabilizerCode, TBCodeSpec};
use crate::decode::{build_graphs, memory_basis, MatchingDecoder, MatchingGraph};
use crate::error::{Error, Result};
use crate::logicals::logical_basis;
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::sim::{extract_dem, Sampler, ShotMatrix, BATCH_SHOTS};
use crate::Basis;

pub use crate::circuits::NoiseModel;

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Outcome of one memory experiment; also one row of the results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult<T> {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    pub rounds: usize,
    pub p_phys: T,
    pub shots: usize,
    pub failures: usize,
    /// Per-round failure probability.
    pub p_k: T,
    /// Per-round, per-logical-qubit failure probability.
    pub p_l: T,
    /// 95% Wilson interval on `failures / shots`, mapped through the `p_l`
    /// conversion.
    pub ci_lo: T,
    pub ci_hi: T,
    pub seed: u64,
}

/// `p_k = 1 − (1 − E/N)^(1/r)` and `p_l = 1 − (1 − p_k)^(1/k)`.
pub fn logical_rates<T: Real>(fail_fraction: T, rounds: usize, k: usize) -> (T, T) {
    let one = T::one();
    let f = fail_fraction.max(T::zero()).min(one);
    let p_k = one - (one - f).powf(one / T::of_usize(rounds));
    let p_l = one - (one - p_k).powf(one / T::of_usize(k));
    (p_k, p_l)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval<T: Real>(successes: usize, trials: usize, z: T) -> (T, T) {
    if trials == 0 {
        return (T::zero(), T::one());
    }
    let n = T::of_usize(trials);
    let p = T::of_usize(successes) / n;
    let (one, two, four) = (T::one(), T::of(2.0), T::of(4.0));
    let z2 = z * z;
    let denom = one + z2 / n;
    let center = p + z2 / (two * n);
    let half = z * (p * (one - p) / n + z2 / (four * n * n)).sqrt();
    // The bounds are exactly 0 and 1 at the extremes; avoid rounding residue.
    let lo = if successes == 0 { T::zero() } else { ((center - half) / denom).max(T::zero()) };
    let hi = if successes == trials { one } else { ((center + half) / denom).min(one) };
    (lo, hi)
}

impl<T: Real> ExperimentResult<T> {
    /// Fills in the derived rates and interval from raw counts.
    #[allow(clippy::too_many_arguments)]
    pub fn from_counts(
        code: &StabilizerCode,
        rounds: usize,
        p_phys: T,
        shots: usize,
        failures: usize,
        seed: u64,
    ) -> Result<Self> {
        if rounds == 0 || shots == 0 {
            return Err(Error::validation("rounds and shots must be at least 1"));
        }
        if failures > shots {
            return Err(Error::validation("more failures than shots"));
        }
        if code.k == 0 {
            return Err(Error::validation("code encodes no logical qubits"));
        }
        let frac = T::of_usize(failures) / T::of_usize(shots);
        let (p_k, p_l) = logical_rates(frac, rounds, code.k);
        let (lo, hi) = wilson_interval(failures, shots, T::of(Z95));
        Ok(Self {
            code: code.name.clone(),
            n: code.n,
            k: code.k,
            d: code.distance.map(|d| d.value),
            rounds,
            p_phys,
            shots,
            failures,
            p_k,
            p_l,
            ci_lo: logical_rates(lo, rounds, code.k).1,
            ci_hi: logical_rates(hi, rounds, code.k).1,
            seed,
        })
    }

    /// True when the two 95% intervals are disjoint.
    pub fn separated_from(&self, other: &Self) -> bool {
        self.ci_hi < other.ci_lo || other.ci_hi < self.ci_lo
    }
}

/// Z-basis memory experiment: builds the circuit with its default schedule,
/// samples `shots` shots and decodes the Z-check graph with MWPM.
///
/// A shot fails when any decoded logical differs from the measured one. The
/// X-check graph carries no observables in a Z-basis memory and is not
/// decoded. A syndrome the graph cannot match counts as a failure.
pub fn run_memory_experiment<T: Real>(
    code: &StabilizerCode,
    noise: NoiseModel,
    rounds: usize,
    shots: usize,
    seed: u64,
) -> Result<ExperimentResult<T>> {
    if shots == 0 {
        return Err(Error::validation("shots must be at least 1"));
    }
    let basis = logical_basis(code);
    let circuit = build_memory_circuit(code, &basis, rounds, noise, Basis::Z)?;
    let failures = if noise.is_noiseless() {
        // Every shot reproduces the noiseless reference; still check it.
        Sampler::new(&circuit)?;
        0
    } else {
        let decoder = ShotDecoder::<T>::new(&circuit)?;
        let sampler = Sampler::new(&circuit)?;
        let batches = shots.div_ceil(BATCH_SHOTS);
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let size = (shots - b * BATCH_SHOTS).min(BATCH_SHOTS);
                let s = sampler.sample_batch(b as u64, size, seed);
                (0..size).filter(|&shot| decoder.fails(&s, shot)).count()
            })
            .sum()
    };
    ExperimentResult::from_counts(code, rounds, T::of(noise.p_physical), shots, failures, seed)
}

/// MWPM decoding of sampled shots in the memory basis of a circuit.
pub struct ShotDecoder<T> {
    graph: MatchingGraph<T>,
    decoder: MatchingDecoder<T>,
}

impl<T: Real> ShotDecoder<T> {
    pub fn new(circuit: &Circuit) -> Result<Self> {
        let dem = extract_dem::<T>(circuit)?;
        let (gz, gx) = build_graphs(&dem, circuit)?;
        let graph = match memory_basis(circuit) {
            Basis::Z => gz,
            Basis::X => gx,
        };
        let decoder = MatchingDecoder::new(&graph);
        Ok(Self { graph, decoder })
    }

    pub fn graph(&self) -> &MatchingGraph<T> {
        &self.graph
    }

    /// `(predicted, measured)` observable masks of one shot.
    pub fn decode(&self, shots: &ShotMatrix, shot: usize) -> Result<(u64, u64)> {
        let fired: Vec<usize> = (0..self.graph.detectors.len())
            .filter(|&i| shots.detector(shot, self.graph.detectors[i]))
            .collect();
        let actual = (0..shots.num_observables).fold(0u64, |a, o| a | (shots.observable(shot, o) as u64) << o);
        Ok((self.decoder.decode_fired(&fired)?.observables, actual))
    }

    /// True when the prediction is wrong or the syndrome cannot be matched.
    pub fn fails(&self, shots: &ShotMatrix, shot: usize) -> bool {
        !matches!(self.decode(shots, shot), Ok((p, a)) if p == a)
    }
}

/// Power law `R(d) = α·d^(−β)` fitted by least squares in log-log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit<T> {
    pub alpha: T,
    pub beta: T,
    /// Sum of squared residuals of `ln R`.
    pub residual: T,
}

impl<T: Real> RateFit<T> {
    pub fn predict(&self, d: T) -> T {
        self.alpha * d.powf(-self.beta)
    }
}

/// Ordinary least squares on `(ln d, ln R)`.
pub fn fit_rate_scaling<T: Real>(points: &[(T, T)]) -> Result<RateFit<T>> {
    if points.iter().any(|&(d, r)| !(d > T::zero()) || !(r > T::zero())) {
        return Err(Error::validation("distances and rates must be positive"));
    }
    let first = points.first().map(|p| p.0);
    if points.len() < 2 || points.iter().all(|p| Some(p.0) == first) {
        return Err(Error::validation("need at least two distinct distances"));
    }
    let n = T::of_usize(points.len());
    let xs: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(RateFit {
        alpha: intercept.exp(),
        beta: -slope,
        residual,
    })
}

/// Parameters of [`random_code_search`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub l: usize,
    pub m: usize,
    pub w_a: usize,
    pub w_b: usize,
    pub max_power: u32,
    pub trials: usize,
    pub seed: u64,
    /// Information-set trials per distance estimate.
    pub distance_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchHit {
    pub spec: TBCodeSpec,
    pub n: usize,
    pub k: usize,
    pub distance: DistanceEstimate,
}

fn random_spec(cfg: &SearchConfig, trial: usize) -> Option<TBCodeSpec> {
    let mut rng = stream_rng(cfg.seed, trial as u64);
    let mut terms = |w: usize| -> Vec<Monomial> {
        (0..w)
            .map(|_| {
                let axis = [Axis::X, Axis::Y, Axis::Z][rng.random_range(0..3)];
                Monomial::new(axis, rng.random_range(0..=cfg.max_power))
            })
            .collect()
    };
    let a = terms(cfg.w_a);
    let b = terms(cfg.w_b);
    // Specs with cancelling terms are skipped.
    TBCodeSpec::new(cfg.l, cfg.m, a, b).ok()
}

/// Samples random monomial specs, keeps the first of each canonical form and
/// returns those whose `(k, d)` satisfy `target`, sorted by `k` descending,
/// `d` descending, then `n`. The distance is the estimator's upper bound.
pub fn random_code_search(
    cfg: &SearchConfig,
    target: impl Fn(usize, usize) -> bool + Sync,
) -> Result<Vec<SearchHit>> {
    if cfg.trials == 0 || cfg.distance_trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    let mut seen = std::collections::HashSet::new();
    let specs: Vec<TBCodeSpec> = (0..cfg.trials)
        .filter_map(|t| random_spec(cfg, t))
        .filter(|s| seen.insert(s.canonical_key()))
        .collect();
    let hits: Vec<Option<SearchHit>> = specs
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| -> Result<Option<SearchHit>> {
            let code = build_code(&spec)?;
            if code.k == 0 {
                return Ok(None);
            }
            let distance = estimate_distance(&code, cfg.distance_trials, cfg.seed ^ i as u64)?;
            Ok(target(code.k, distance.upper_bound).then_some(SearchHit {
                n: code.n,
                k: code.k,
                distance,
                spec,
            }))
        })
        .collect::<Result<_>>()?;
    let mut hits: Vec<SearchHit> = hits.into_iter().flatten().collect();
    hits.sort_by(|a, b| {
        b.k.cmp(&a.k)
            .then(b.distance.upper_bound.cmp(&a.distance.upper_bound))
            .then(a.n.cmp(&b.n))
    });
    Ok(hits)
}

/// `(data qubits, data + one auxiliary per check)`.
pub fn qubit_overhead(code: &StabilizerCode) -> (usize, usize) {
    (code.n, code.n + code.h_x.rows() + code.h_z.rows())
}

/// Writes results with the header
/// `code,n,k,d,rounds,p_phys,shots,failures,p_k,p_l,ci_lo,ci_hi,seed`.
pub fn write_results_csv<T: Real + Serialize, W: Write>(out: W, rows: &[ExperimentResult<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<T: Real + DeserializeOwned, R: Read>(input: R) -> Result<Vec<ExperimentResult<T>>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {}", header.join(",")),
        });
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub const CSV_HEADER: [&str; 13] = [
    "code", "n", "k", "d", "rounds", "p_phys", "shots", "failures", "p_k", "p_l", "ci_lo", "ci_hi", "seed",
];

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::Parse {
            line,
            msg: e.to_string(),
        }
    }
}
