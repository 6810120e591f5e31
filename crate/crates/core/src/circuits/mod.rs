//! Circuit representation, stim-compatible text I/O, gate scheduling and
//! memory-experiment builders.

mod memory;
mod schedule;
mod text;

use crate::error::{Error, Result};

pub use memory::{
    build_memory_circuit, build_memory_circuit_with_schedule, round_start_index, AuxLayout,
    NoiseModel,
};
pub use schedule::{bad_interleaved_schedule, make_schedule, validate_schedule, Schedule};
pub use text::{parse, serialize};

/// Operation kinds. Noise channels carry their probability.
#[derive(Clone, Debug, PartialEq)]
pub enum InstructionKind {
    ResetZ,
    ResetX,
    H,
    X,
    Y,
    Z,
    CNOT,
    CZ,
    MeasureZ,
    MeasureX,
    Tick,
    Depolarize1(f64),
    Depolarize2(f64),
    XError(f64),
    ZError(f64),
    /// Parity of the measurement records in `targets`, with coordinates.
    Detector(Vec<f64>),
    /// Adds the records in `targets` to the given logical observable.
    Observable(usize),
}

impl InstructionKind {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, InstructionKind::CNOT | InstructionKind::CZ | InstructionKind::Depolarize2(_))
    }

    pub fn is_annotation(&self) -> bool {
        matches!(self, InstructionKind::Detector(_) | InstructionKind::Observable(_))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, InstructionKind::MeasureZ | InstructionKind::MeasureX)
    }

    pub fn is_noise(&self) -> bool {
        self.probability().is_some()
    }

    pub fn probability(&self) -> Option<f64> {
        match *self {
            InstructionKind::Depolarize1(p)
            | InstructionKind::Depolarize2(p)
            | InstructionKind::XError(p)
            | InstructionKind::ZError(p) => Some(p),
            _ => None,
        }
    }
}

/// One instruction. Gate and noise targets are qubits; detector and
/// observable targets are absolute measurement record indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub kind: InstructionKind,
    pub targets: Vec<usize>,
}

impl Instruction {
    pub fn new(kind: InstructionKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    instructions: Vec<Instruction>,
    num_measurements: usize,
    num_detectors: usize,
    num_observables: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ..Self::default()
        }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    fn check(&self, ins: &Instruction, measurements_before: usize) -> Result<()> {
        if let Some(p) = ins.kind.probability() {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::validation(format!("probability {p} outside [0, 1]")));
            }
        }
        if ins.kind.is_annotation() {
            if let Some(&r) = ins.targets.iter().find(|&&r| r >= measurements_before) {
                return Err(Error::validation(format!(
                    "record {r} referenced before it exists ({measurements_before} measurements so far)"
                )));
            }
            return Ok(());
        }
        if let Some(&q) = ins.targets.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::shape(format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        if ins.kind.is_two_qubit() {
            if !ins.targets.len().is_multiple_of(2) {
                return Err(Error::validation("two-qubit instruction with an odd target count"));
            }
            if ins.targets.chunks(2).any(|p| p[0] == p[1]) {
                return Err(Error::validation("two-qubit instruction on a repeated qubit"));
            }
        }
        Ok(())
    }

    /// Appends an instruction after validating its targets.
    pub fn push(&mut self, ins: Instruction) -> Result<()> {
        self.check(&ins, self.num_measurements)?;
        match &ins.kind {
            k if k.is_measurement() => self.num_measurements += ins.targets.len(),
            InstructionKind::Detector(_) => self.num_detectors += 1,
            InstructionKind::Observable(i) => self.num_observables = self.num_observables.max(i + 1),
            _ => {}
        }
        self.instructions.push(ins);
        Ok(())
    }

    /// Convenience for `push(Instruction::new(kind, targets))`.
    pub fn append(&mut self, kind: InstructionKind, targets: Vec<usize>) -> Result<()> {
        self.push(Instruction::new(kind, targets))
    }

    /// Inserts a gate or noise instruction at position `at`. Measurements and
    /// annotations cannot be inserted because later record indices would shift.
    pub fn insert(&mut self, at: usize, ins: Instruction) -> Result<()> {
        if ins.kind.is_measurement() || ins.kind.is_annotation() {
            return Err(Error::validation("only gates and noise can be inserted"));
        }
        if at > self.instructions.len() {
            return Err(Error::shape(format!("insert position {at} past the end")));
        }
        self.check(&ins, 0)?;
        self.instructions.insert(at, ins);
        Ok(())
    }

    /// Records and coordinates of every detector, in declaration order.
    pub fn detectors(&self) -> Vec<(&[usize], &[f64])> {
        self.instructions
            .iter()
            .filter_map(|i| match &i.kind {
                InstructionKind::Detector(c) => Some((i.targets.as_slice(), c.as_slice())),
                _ => None,
            })
            .collect()
    }

    /// Measurement records included in each observable.
    pub fn observables(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_observables];
        for i in &self.instructions {
            if let InstructionKind::Observable(j) = i.kind {
                out[j].extend_from_slice(&i.targets);
            }
        }
        out
    }

    /// Copy with every noise channel removed.
    pub fn without_noise(&self) -> Circuit {
        let mut c = self.clone();
        c.instructions.retain(|i| !i.kind.is_noise());
        c
    }

    /// Total number of targets over instructions of the given kind
    /// (two-qubit kinds count pairs).
    pub fn count_targets(&self, pred: impl Fn(&InstructionKind) -> bool) -> usize {
        self.instructions
            .iter()
            .filter(|i| pred(&i.kind))
            .map(|i| {
                if i.kind.is_two_qubit() {
                    i.targets.len() / 2
                } else {
                    i.targets.len()
                }
            })
            .sum()
    }
}
