//! Pauli-frame Monte Carlo sampling, 64 shots per word.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use super::tableau::simulate_tableau;
use crate::circuits::{Circuit, Instruction, InstructionKind};
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;
use crate::rng::stream_rng;

/// Shots per RNG stream. Batch `b` always covers shots `b·BATCH_SHOTS..`,
/// so results do not depend on how batches are spread over threads.
pub const BATCH_SHOTS: usize = 1024;

/// Sampled detector and observable bits, one row per shot: detectors first,
/// then observables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotMatrix {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub bits: BitMatrix,
}

impl ShotMatrix {
    pub fn shots(&self) -> usize {
        self.bits.rows()
    }

    pub fn detector(&self, shot: usize, d: usize) -> bool {
        self.bits.get(shot, d)
    }

    pub fn observable(&self, shot: usize, o: usize) -> bool {
        self.bits.get(shot, self.num_detectors + o)
    }

    /// Rows packed to bytes, little-endian bit order within each byte
    /// (stim's `b8` layout).
    pub fn to_b8(&self) -> Vec<u8> {
        let width = self.bits.cols();
        let per_row = width.div_ceil(8);
        let mut out = Vec::with_capacity(per_row * self.shots());
        for s in 0..self.shots() {
            let words = self.bits.row_words(s);
            for byte in 0..per_row {
                out.push((words[byte / 8] >> (8 * (byte % 8))) as u8);
            }
        }
        out
    }

    pub fn from_b8(bytes: &[u8], num_detectors: usize, num_observables: usize) -> Result<Self> {
        let width = num_detectors + num_observables;
        let per_row = width.div_ceil(8).max(1);
        if width == 0 || bytes.len() % per_row != 0 {
            return Err(Error::shape(format!(
                "{} bytes is not a whole number of {per_row}-byte rows",
                bytes.len()
            )));
        }
        let shots = bytes.len() / per_row;
        let mut bits = BitMatrix::zeros(shots, width);
        for s in 0..shots {
            for c in 0..width {
                if bytes[s * per_row + c / 8] >> (c % 8) & 1 == 1 {
                    bits.set(s, c, true);
                }
            }
        }
        Ok(Self {
            num_detectors,
            num_observables,
            bits,
        })
    }
}

/// Frame state for a block of `words·64` independent columns.
pub(crate) struct Frames {
    pub words: usize,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
    pub records: Vec<u64>,
}

impl Frames {
    pub fn new(qubits: usize, measurements: usize, words: usize) -> Self {
        Self {
            words,
            x: vec![0; qubits * words],
            z: vec![0; qubits * words],
            records: Vec::with_capacity(measurements * words),
        }
    }

    #[inline]
    pub fn flip(&mut self, q: usize, col: usize, x: bool, z: bool) {
        let (w, b) = (q * self.words + col / 64, 1u64 << (col % 64));
        if x {
            self.x[w] ^= b;
        }
        if z {
            self.z[w] ^= b;
        }
    }

    fn row(v: &mut [u64], q: usize, words: usize) -> &mut [u64] {
        &mut v[q * words..(q + 1) * words]
    }

    /// Propagates through one non-noise instruction.
    pub fn apply(&mut self, ins: &Instruction) {
        let w = self.words;
        match ins.kind {
            InstructionKind::ResetZ | InstructionKind::ResetX => {
                for &q in &ins.targets {
                    Self::row(&mut self.x, q, w).fill(0);
                    Self::row(&mut self.z, q, w).fill(0);
                }
            }
            InstructionKind::H => {
                for &q in &ins.targets {
                    for i in q * w..(q + 1) * w {
                        std::mem::swap(&mut self.x[i], &mut self.z[i]);
                    }
                }
            }
            InstructionKind::CNOT => {
                for p in ins.targets.chunks(2) {
                    let (c, t) = (p[0], p[1]);
                    for i in 0..w {
                        self.x[t * w + i] ^= self.x[c * w + i];
                        self.z[c * w + i] ^= self.z[t * w + i];
                    }
                }
            }
            InstructionKind::CZ => {
                for p in ins.targets.chunks(2) {
                    let (a, b) = (p[0], p[1]);
                    for i in 0..w {
                        let (xa, xb) = (self.x[a * w + i], self.x[b * w + i]);
                        self.z[a * w + i] ^= xb;
                        self.z[b * w + i] ^= xa;
                    }
                }
            }
            InstructionKind::MeasureZ => {
                for &q in &ins.targets {
                    self.records.extend_from_slice(&self.x[q * w..(q + 1) * w]);
                }
            }
            InstructionKind::MeasureX => {
                for &q in &ins.targets {
                    self.records.extend_from_slice(&self.z[q * w..(q + 1) * w]);
                }
            }
            _ => {}
        }
    }

    /// XOR of the given record rows.
    pub fn parity(&self, recs: &[usize]) -> Vec<u64> {
        let w = self.words;
        let mut out = vec![0u64; w];
        for &r in recs {
            for (o, v) in out.iter_mut().zip(&self.records[r * w..(r + 1) * w]) {
                *o ^= v;
            }
        }
        out
    }
}

/// `(x, z)` of the Paulis X, Y, Z indexed 1..=3 (0 is the identity).
pub(crate) const PAULI_BITS: [(bool, bool); 4] = [(false, false), (true, false), (true, true), (false, true)];

/// Samples a noise channel over `targets × shots` positions using geometric
/// skips between firings.
fn sample_noise(ins: &Instruction, shots: usize, frames: &mut Frames, rng: &mut ChaCha8Rng) {
    let Some(p) = ins.kind.probability() else {
        return;
    };
    if p <= 0.0 {
        return;
    }
    let sites = if ins.kind.is_two_qubit() {
        ins.targets.len() / 2
    } else {
        ins.targets.len()
    };
    let total = (sites * shots) as u64;
    let geo = (p < 1.0).then(|| Geometric::new(p).expect("p in (0, 1)"));
    let mut pos = match &geo {
        Some(g) => g.sample(rng),
        None => 0,
    };
    while pos < total {
        let (site, shot) = ((pos / shots as u64) as usize, (pos % shots as u64) as usize);
        match ins.kind {
            InstructionKind::Depolarize1(_) => {
                let (x, z) = PAULI_BITS[rng.random_range(1..4)];
                frames.flip(ins.targets[site], shot, x, z);
            }
            InstructionKind::Depolarize2(_) => {
                let r = rng.random_range(1..16usize);
                let ((xa, za), (xb, zb)) = (PAULI_BITS[r >> 2], PAULI_BITS[r & 3]);
                frames.flip(ins.targets[2 * site], shot, xa, za);
                frames.flip(ins.targets[2 * site + 1], shot, xb, zb);
            }
            InstructionKind::XError(_) => frames.flip(ins.targets[site], shot, true, false),
            InstructionKind::ZError(_) => frames.flip(ins.targets[site], shot, false, true),
            _ => unreachable!("noise kinds only"),
        }
        pos = match &geo {
            Some(g) => pos.saturating_add(1).saturating_add(g.sample(rng)),
            None => pos + 1,
        };
    }
}

/// Reusable sampler: holds the noiseless reference outcomes.
pub struct Sampler<'a> {
    circuit: &'a Circuit,
    detector_records: Vec<Vec<usize>>,
    observable_records: Vec<Vec<usize>>,
    reference: Vec<bool>,
}

impl<'a> Sampler<'a> {
    /// Fails with a contract error when some detector or observable of the
    /// noiseless circuit is not deterministic.
    pub fn new(circuit: &'a Circuit) -> Result<Self> {
        let out = simulate_tableau(circuit);
        let bad = out.nondeterministic_detectors();
        if !bad.is_empty() {
            return Err(Error::Contract(format!(
                "{} detector(s) are not deterministic in the noiseless circuit (first: D{})",
                bad.len(),
                bad[0]
            )));
        }
        if let Some(o) = out.observables.iter().position(Option::is_none) {
            return Err(Error::Contract(format!("observable L{o} is not deterministic")));
        }
        let reference = out
            .detectors
            .iter()
            .chain(&out.observables)
            .map(|v| v.expect("checked"))
            .collect();
        Ok(Self {
            circuit,
            detector_records: circuit.detectors().iter().map(|(r, _)| r.to_vec()).collect(),
            observable_records: circuit.observables(),
            reference,
        })
    }

    pub fn num_detectors(&self) -> usize {
        self.detector_records.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observable_records.len()
    }

    /// Shots `batch·BATCH_SHOTS .. batch·BATCH_SHOTS + shots`, from the RNG
    /// stream `(seed, batch)`.
    pub fn sample_batch(&self, batch: u64, shots: usize, seed: u64) -> ShotMatrix {
        assert!(shots <= BATCH_SHOTS);
        let mut rng = stream_rng(seed, batch);
        let words = shots.div_ceil(64).max(1);
        let c = self.circuit;
        let mut frames = Frames::new(c.num_qubits, c.num_measurements(), words);
        for ins in c.instructions() {
            if ins.kind.is_noise() {
                sample_noise(ins, shots, &mut frames, &mut rng);
            } else {
                frames.apply(ins);
            }
        }
        let (nd, no) = (self.num_detectors(), self.num_observables());
        let mut bits = BitMatrix::zeros(shots, nd + no);
        let all = self.detector_records.iter().chain(&self.observable_records);
        for (col, recs) in all.enumerate() {
            let mut flips = frames.parity(recs);
            if self.reference[col] {
                flips.iter_mut().for_each(|w| *w = !*w);
            }
            for (wi, &word) in flips.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    let shot = wi * 64 + b;
                    if shot < shots {
                        bits.set(shot, col, true);
                    }
                }
            }
        }
        ShotMatrix {
            num_detectors: nd,
            num_observables: no,
            bits,
        }
    }

    /// `shots` samples; a deterministic function of `(circuit, shots, seed)`.
    pub fn sample(&self, shots: usize, seed: u64) -> ShotMatrix {
        let batches = shots.div_ceil(BATCH_SHOTS);
        let parts: Vec<ShotMatrix> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let n = (shots - b * BATCH_SHOTS).min(BATCH_SHOTS);
                self.sample_batch(b as u64, n, seed)
            })
            .collect();
        let (nd, no) = (self.num_detectors(), self.num_observables());
        let mut bits = BitMatrix::zeros(0, nd + no);
        for p in &parts {
            for r in 0..p.shots() {
                bits.push_row_words(p.bits.row_words(r));
            }
        }
        ShotMatrix {
            num_detectors: nd,
            num_observables: no,
            bits,
        }
    }
}

/// Samples detector and observable bits for `shots` shots.
pub fn sample(c: &Circuit, shots: usize, seed: u64) -> Result<ShotMatrix> {
    Ok(Sampler::new(c)?.sample(shots, seed))
}
