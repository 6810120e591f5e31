//! Detector error model extraction by propagating each fault component alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::frame::{Frames, PAULI_BITS};
use super::tableau::simulate_tableau;
use crate::circuits::{Circuit, InstructionKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// An independent fault: with `probability` it flips exactly these detectors
/// and observables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultMechanism<T> {
    pub probability: T,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectorErrorModel<T> {
    pub num_detectors: usize,
    pub num_observables: usize,
    /// Sorted by `(detectors, observables)`; signatures are unique.
    pub mechanisms: Vec<FaultMechanism<T>>,
}

impl<T: Real> DetectorErrorModel<T> {
    /// One `error(p) D.. L..` line per mechanism.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.mechanisms {
            write!(s, "error({})", m.probability).unwrap();
            for d in &m.detectors {
                write!(s, " D{d}").unwrap();
            }
            for o in &m.observables {
                write!(s, " L{o}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Probability that each detector fires, treating mechanisms as independent.
    pub fn detector_marginals(&self) -> Vec<T> {
        let mut q = vec![T::zero(); self.num_detectors];
        let two = T::of(2.0);
        for m in &self.mechanisms {
            for &d in &m.detectors {
                q[d] = q[d] + m.probability - two * q[d] * m.probability;
            }
        }
        q
    }
}

/// Independent-XOR combination of two probabilities.
pub(crate) fn xor_prob(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// One Pauli component of a noise channel.
struct Component {
    instruction: usize,
    /// `(qubit, x, z)` flips applied together.
    flips: Vec<(usize, bool, bool)>,
    probability: f64,
}

fn components(c: &Circuit) -> Vec<Component> {
    let mut out = Vec::new();
    for (i, ins) in c.instructions().iter().enumerate() {
        let Some(p) = ins.kind.probability() else {
            continue;
        };
        if p == 0.0 {
            continue;
        }
        match ins.kind {
            InstructionKind::Depolarize1(_) => {
                for &q in &ins.targets {
                    for &(x, z) in &PAULI_BITS[1..] {
                        out.push(Component {
                            instruction: i,
                            flips: vec![(q, x, z)],
                            probability: p / 3.0,
                        });
                    }
                }
            }
            InstructionKind::Depolarize2(_) => {
                for pair in ins.targets.chunks(2) {
                    for r in 1..16 {
                        let ((xa, za), (xb, zb)) = (PAULI_BITS[r >> 2], PAULI_BITS[r & 3]);
                        out.push(Component {
                            instruction: i,
                            flips: vec![(pair[0], xa, za), (pair[1], xb, zb)],
                            probability: p / 15.0,
                        });
                    }
                }
            }
            InstructionKind::XError(_) | InstructionKind::ZError(_) => {
                let x = matches!(ins.kind, InstructionKind::XError(_));
                for &q in &ins.targets {
                    out.push(Component {
                        instruction: i,
                        flips: vec![(q, x, !x)],
                        probability: p,
                    });
                }
            }
            _ => unreachable!("noise kinds only"),
        }
    }
    out
}

const WORDS: usize = 16;

/// Detector and observable signature of each component in the block.
fn propagate_block(c: &Circuit, block: &[Component], dets: &[Vec<usize>], obs: &[Vec<usize>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let words = block.len().div_ceil(64);
    let mut frames = Frames::new(c.num_qubits, c.num_measurements(), words);
    let mut next = 0;
    for (i, ins) in c.instructions().iter().enumerate() {
        if ins.kind.is_noise() {
            while next < block.len() && block[next].instruction == i {
                for &(q, x, z) in &block[next].flips {
                    frames.flip(q, next, x, z);
                }
                next += 1;
            }
        } else {
            frames.apply(ins);
        }
    }
    let mut sigs = vec![(Vec::new(), Vec::new()); block.len()];
    let scatter = |recs: &[usize], id: usize, into_obs: bool, sigs: &mut Vec<(Vec<usize>, Vec<usize>)>| {
        for (wi, &word) in frames.parity(recs).iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let col = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if col < block.len() {
                    let s = &mut sigs[col];
                    if into_obs { s.1.push(id) } else { s.0.push(id) }
                }
            }
        }
    };
    for (d, recs) in dets.iter().enumerate() {
        scatter(recs, d, false, &mut sigs);
    }
    for (o, recs) in obs.iter().enumerate() {
        scatter(recs, o, true, &mut sigs);
    }
    sigs
}

/// Extracts the detector error model of a noisy circuit.
///
/// Fails with a contract error if the noiseless reference is not
/// deterministic.
pub fn extract_dem<T: Real>(c: &Circuit) -> Result<DetectorErrorModel<T>> {
    let reference = simulate_tableau(c);
    if !reference.is_deterministic() {
        return Err(Error::Contract(
            "noiseless circuit has non-deterministic detectors or observables".into(),
        ));
    }
    let comps = components(c);
    let dets: Vec<Vec<usize>> = c.detectors().iter().map(|(r, _)| r.to_vec()).collect();
    let obs = c.observables();
    let sigs: Vec<(Vec<usize>, Vec<usize>)> = comps
        .par_chunks(WORDS * 64)
        .flat_map_iter(|block| propagate_block(c, block, &dets, &obs))
        .collect();
    let mut merged: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    for (comp, sig) in comps.iter().zip(sigs) {
        if sig.0.is_empty() && sig.1.is_empty() {
            continue;
        }
        let p = merged.entry(sig).or_insert(0.0);
        *p = xor_prob(*p, comp.probability);
    }
    Ok(DetectorErrorModel {
        num_detectors: dets.len(),
        num_observables: obs.len(),
        mechanisms: merged
            .into_iter()
            .map(|((detectors, observables), p)| FaultMechanism {
                probability: T::of(p),
                detectors,
                observables,
            })
            .collect(),
    })
}
