//! Memory-experiment circuits: repeated syndrome extraction followed by a
//! transversal data measurement.

use serde::{Deserialize, Serialize};

use super::{make_schedule, Circuit, Instruction, InstructionKind, Schedule};
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::logicals::LogicalBasis;
use crate::Basis;

/// Uniform circuit-level noise with a single physical error rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_physical: f64,
}

impl NoiseModel {
    pub fn new(p_physical: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p_physical) {
            return Err(Error::validation(format!(
                "physical error rate {p_physical} outside [0, 0.5)"
            )));
        }
        Ok(Self { p_physical })
    }

    pub fn noiseless() -> Self {
        Self { p_physical: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_physical == 0.0
    }
}

/// Qubit numbering: data `0..n`, X auxiliaries next, then Z auxiliaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxLayout {
    pub n: usize,
    pub x_checks: usize,
    pub z_checks: usize,
}

impl AuxLayout {
    pub fn of(code: &StabilizerCode) -> Self {
        Self {
            n: code.n,
            x_checks: code.h_x.rows(),
            z_checks: code.h_z.rows(),
        }
    }

    pub fn x_aux(&self, c: usize) -> usize {
        self.n + c
    }

    pub fn z_aux(&self, c: usize) -> usize {
        self.n + self.x_checks + c
    }

    pub fn total(&self) -> usize {
        self.n + self.x_checks + self.z_checks
    }

    fn checks(&self, basis: Basis) -> usize {
        match basis {
            Basis::X => self.x_checks,
            Basis::Z => self.z_checks,
        }
    }
}

/// Detector coordinate encoding of a check type.
pub(crate) fn basis_coord(b: Basis) -> f64 {
    match b {
        Basis::Z => 0.0,
        Basis::X => 1.0,
    }
}

/// Memory circuit with the code's default schedule from [`make_schedule`].
pub fn build_memory_circuit(
    code: &StabilizerCode,
    basis: &LogicalBasis,
    rounds: usize,
    noise: NoiseModel,
    mem_basis: Basis,
) -> Result<Circuit> {
    let schedule = make_schedule(code)?;
    build_memory_circuit_with_schedule(code, basis, rounds, noise, mem_basis, &schedule)
}

struct Builder {
    c: Circuit,
    p: f64,
}

impl Builder {
    fn op(&mut self, kind: InstructionKind, targets: Vec<usize>) -> Result<()> {
        if targets.is_empty() {
            return Ok(());
        }
        self.c.push(Instruction::new(kind, targets))
    }

    fn noise(&mut self, kind: fn(f64) -> InstructionKind, targets: Vec<usize>) -> Result<()> {
        if self.p > 0.0 {
            self.op(kind(self.p), targets)?;
        }
        Ok(())
    }
}

/// Memory circuit with an explicit schedule.
///
/// Detectors carry coordinates `(check, round, basis)` with basis 0 for Z
/// checks and 1 for X checks. Round 0 only has detectors for checks of the
/// memory basis; the final round (`rounds`) compares the last auxiliary
/// outcome with the parity of the data measurement. Observable `i` is the
/// memory-basis representative of logical qubit `i`.
pub fn build_memory_circuit_with_schedule(
    code: &StabilizerCode,
    basis: &LogicalBasis,
    rounds: usize,
    noise: NoiseModel,
    mem_basis: Basis,
    schedule: &Schedule,
) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::validation("rounds must be at least 1"));
    }
    if basis.pairs.iter().any(|(x, z)| x.n != code.n || z.n != code.n) {
        return Err(Error::shape("logical basis does not match the code size"));
    }
    let lay = AuxLayout::of(code);
    let data: Vec<usize> = (0..lay.n).collect();
    let x_aux: Vec<usize> = (0..lay.x_checks).map(|c| lay.x_aux(c)).collect();
    let z_aux: Vec<usize> = (0..lay.z_checks).map(|c| lay.z_aux(c)).collect();
    let aux: Vec<usize> = x_aux.iter().chain(&z_aux).copied().collect();
    let mut b = Builder {
        c: Circuit::new(lay.total()),
        p: noise.p_physical,
    };
    let check_support = |basis: Basis, c: usize| match basis {
        Basis::X => code.h_x.row_support(c),
        Basis::Z => code.h_z.row_support(c),
    };
    // Record index of each check's outcome in the previous round.
    let mut prev: Option<(Vec<usize>, Vec<usize>)> = None;

    for round in 0..rounds {
        if round == 0 {
            let mut reset_z = aux.clone();
            if mem_basis == Basis::Z {
                reset_z.splice(0..0, data.iter().copied());
            } else {
                b.op(InstructionKind::ResetX, data.clone())?;
            }
            b.op(InstructionKind::ResetZ, reset_z)?;
            let all: Vec<usize> = data.iter().chain(&aux).copied().collect();
            b.noise(InstructionKind::Depolarize1, all)?;
        } else {
            b.op(InstructionKind::ResetZ, aux.clone())?;
            b.noise(InstructionKind::Depolarize1, aux.clone())?;
        }
        b.op(InstructionKind::H, x_aux.clone())?;
        b.noise(InstructionKind::Depolarize1, x_aux.clone())?;
        b.c.push(Instruction::new(InstructionKind::Tick, vec![]))?;
        for layer in 0..4 {
            let mut pairs = Vec::new();
            for (c, q) in schedule.layer(Basis::Z, layer) {
                pairs.extend([q, lay.z_aux(c)]);
            }
            for (c, q) in schedule.layer(Basis::X, layer) {
                pairs.extend([lay.x_aux(c), q]);
            }
            b.op(InstructionKind::CNOT, pairs.clone())?;
            b.noise(InstructionKind::Depolarize2, pairs)?;
            b.c.push(Instruction::new(InstructionKind::Tick, vec![]))?;
        }
        b.op(InstructionKind::H, x_aux.clone())?;
        b.noise(InstructionKind::Depolarize1, x_aux.clone())?;
        b.c.push(Instruction::new(InstructionKind::Tick, vec![]))?;
        b.noise(InstructionKind::XError, aux.clone())?;
        let first = b.c.num_measurements();
        b.op(InstructionKind::MeasureZ, aux.clone())?;
        let x_rec: Vec<usize> = (0..lay.x_checks).map(|c| first + c).collect();
        let z_rec: Vec<usize> = (0..lay.z_checks).map(|c| first + lay.x_checks + c).collect();

        for det_basis in [Basis::X, Basis::Z] {
            if round == 0 && det_basis != mem_basis {
                continue;
            }
            let (cur, old) = match (det_basis, &prev) {
                (Basis::X, p) => (&x_rec, p.as_ref().map(|p| &p.0)),
                (Basis::Z, p) => (&z_rec, p.as_ref().map(|p| &p.1)),
            };
            for c in 0..lay.checks(det_basis) {
                let mut recs = vec![cur[c]];
                if let Some(old) = old {
                    recs.push(old[c]);
                }
                b.c.push(Instruction::new(
                    InstructionKind::Detector(vec![c as f64, round as f64, basis_coord(det_basis)]),
                    recs,
                ))?;
            }
        }
        prev = Some((x_rec, z_rec));
    }

    let (flip, measure) = match mem_basis {
        Basis::Z => (InstructionKind::XError as fn(f64) -> InstructionKind, InstructionKind::MeasureZ),
        Basis::X => (InstructionKind::ZError as fn(f64) -> InstructionKind, InstructionKind::MeasureX),
    };
    b.noise(flip, data.clone())?;
    let first = b.c.num_measurements();
    b.op(measure, data)?;
    let (x_rec, z_rec) = prev.expect("rounds >= 1");
    let last = if mem_basis == Basis::X { x_rec } else { z_rec };
    for (c, &last_c) in last.iter().enumerate() {
        let mut recs = vec![last_c];
        recs.extend(check_support(mem_basis, c).into_iter().map(|q| first + q));
        b.c.push(Instruction::new(
            InstructionKind::Detector(vec![c as f64, rounds as f64, basis_coord(mem_basis)]),
            recs,
        ))?;
    }
    for (i, op) in basis.of_type(mem_basis).into_iter().enumerate() {
        let recs = op.support().into_iter().map(|q| first + q).collect();
        b.c.push(Instruction::new(InstructionKind::Observable(i), recs))?;
    }
    Ok(b.c)
}

/// Index of the first instruction of syndrome round `round` (0-based) in a
/// circuit from [`build_memory_circuit`]: the round's auxiliary reset. An
/// index equal to `rounds` points at the final data measurement block.
pub fn round_start_index(c: &Circuit, round: usize) -> Option<usize> {
    let resets: Vec<usize> = c
        .instructions()
        .iter()
        .enumerate()
        .filter(|(_, i)| i.kind == InstructionKind::ResetZ)
        .map(|(j, _)| j)
        .collect();
    if round < resets.len() {
        return Some(resets[round]);
    }
    if round == resets.len() {
        // Final block starts after the last auxiliary measurement's detectors.
        let last_m = c
            .instructions()
            .iter()
            .rposition(|i| i.kind.is_measurement())?;
        let before = c.instructions()[..last_m]
            .iter()
            .rposition(|i| i.kind.is_measurement())?;
        return c.instructions()[before + 1..]
            .iter()
            .position(|i| !i.kind.is_annotation())
            .map(|p| before + 1 + p);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::serialize;
    use crate::codes::named_code;
    use crate::logicals::logical_basis;
    use crate::sim::simulate_tableau;

    fn circuit(name: &str, rounds: usize, p: f64, mem: Basis) -> Circuit {
        let code = named_code(name).unwrap();
        let basis = logical_basis(&code);
        build_memory_circuit(&code, &basis, rounds, NoiseModel::new(p).unwrap(), mem).unwrap()
    }

    #[test]
    fn surface3_detector_count() {
        let c = circuit("surface3", 3, 0.0, Basis::Z);
        assert_eq!(c.num_detectors(), 24);
        assert_eq!(c.num_qubits, 17);
    }

    #[test]
    fn twelve_one_round_counts() {
        let c = circuit("tb12", 1, 0.0, Basis::Z);
        assert_eq!(c.num_qubits, 24);
        assert_eq!(c.count_targets(|k| *k == InstructionKind::CNOT), 48);
        assert_eq!(c.count_targets(|k| matches!(k, InstructionKind::ResetZ | InstructionKind::ResetX)), 24);
        let text = serialize(&c);
        assert_eq!(text.lines().filter(|l| l.starts_with("CX ")).count(), 4);
    }

    #[test]
    fn four_entangling_layers_per_round() {
        for (name, r) in [("tb12", 3), ("tb88", 2), ("surface5", 2)] {
            let c = circuit(name, r, 0.001, Basis::Z);
            assert_eq!(
                c.instructions().iter().filter(|i| i.kind == InstructionKind::CNOT).count(),
                4 * r,
                "{name}"
            );
        }
    }

    #[test]
    fn noiseless_is_deterministic_zero() {
        for mem in [Basis::Z, Basis::X] {
            for r in [1, 2, 3] {
                let c = circuit("tb12", r, 0.0, mem);
                let out = simulate_tableau(&c);
                assert!(out.detectors.iter().all(|d| *d == Some(false)));
                assert!(out.observables.iter().all(|d| *d == Some(false)));
            }
        }
    }

    #[test]
    fn injected_x_on_qubit_one_fires_z_checks_one_and_two() {
        let mut c = circuit("tb12", 3, 0.0, Basis::Z);
        let at = round_start_index(&c, 1).unwrap();
        c.insert(at, Instruction::new(InstructionKind::X, vec![0])).unwrap();
        let out = simulate_tableau(&c);
        let dets = c.detectors();
        let fired: Vec<(usize, usize, usize)> = out
            .detectors
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == Some(true))
            .map(|(i, _)| {
                let co = dets[i].1;
                (co[0] as usize + 1, co[1] as usize, co[2] as usize)
            })
            .collect();
        assert_eq!(fired, vec![(1, 1, 0), (2, 1, 0)]);
        assert!(out.observables.iter().all(|o| o.is_some()));
    }

    #[test]
    fn rejects_zero_rounds() {
        let code = named_code("tb12").unwrap();
        let basis = logical_basis(&code);
        let err = build_memory_circuit(&code, &basis, 0, NoiseModel::noiseless(), Basis::Z).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(NoiseModel::new(0.5).is_err());
    }
}
