//! Physical Clifford sequences and the symplectic action they induce on logicals.

use std::fmt;
use std::str::FromStr;

use super::{stabilizer_generators, stabilizer_space, LogicalBasis, PauliOp};
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhysicalGate {
    X,
    Y,
    Z,
    H,
    S,
    SDag,
    SqrtX,
    SqrtXDag,
    /// `R_Z(π/2)` followed by `R_Y(π/2)`.
    C,
    /// `R_X(π/2)` followed by `R_Y(π/2)`, the inverse action of `C`.
    CPrime,
    CZ,
    CNOT,
}

impl PhysicalGate {
    pub fn arity(self) -> usize {
        match self {
            PhysicalGate::CZ | PhysicalGate::CNOT => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhysicalGate::X => "X",
            PhysicalGate::Y => "Y",
            PhysicalGate::Z => "Z",
            PhysicalGate::H => "H",
            PhysicalGate::S => "S",
            PhysicalGate::SDag => "S_DAG",
            PhysicalGate::SqrtX => "SQRT_X",
            PhysicalGate::SqrtXDag => "SQRT_X_DAG",
            PhysicalGate::C => "C",
            PhysicalGate::CPrime => "C_PRIME",
            PhysicalGate::CZ => "CZ",
            PhysicalGate::CNOT => "CNOT",
        }
    }

    /// Images of X and Z under conjugation, each as `(phase, x, z)` with the
    /// operator `i^phase X^x Z^z`.
    fn single_images(self) -> [(u8, bool, bool); 2] {
        const X: (u8, bool, bool) = (0, true, false);
        const Z: (u8, bool, bool) = (0, false, true);
        const NEG_X: (u8, bool, bool) = (2, true, false);
        const NEG_Z: (u8, bool, bool) = (2, false, true);
        const Y: (u8, bool, bool) = (1, true, true);
        const NEG_Y: (u8, bool, bool) = (3, true, true);
        match self {
            PhysicalGate::X => [X, NEG_Z],
            PhysicalGate::Y => [NEG_X, NEG_Z],
            PhysicalGate::Z => [NEG_X, Z],
            PhysicalGate::H => [Z, X],
            PhysicalGate::S => [Y, Z],
            PhysicalGate::SDag => [NEG_Y, Z],
            PhysicalGate::SqrtX => [X, NEG_Y],
            PhysicalGate::SqrtXDag => [X, Y],
            PhysicalGate::C => [Y, X],
            PhysicalGate::CPrime => [NEG_Z, NEG_Y],
            PhysicalGate::CZ | PhysicalGate::CNOT => unreachable!("two-qubit gate"),
        }
    }

    /// Images of `X_a, Z_a, X_b, Z_b` as `(phase, xa, za, xb, zb)`.
    fn pair_images(self) -> [(u8, [bool; 4]); 4] {
        const F: bool = false;
        const T: bool = true;
        match self {
            PhysicalGate::CZ => [
                (0, [T, F, F, T]),
                (0, [F, T, F, F]),
                (0, [F, T, T, F]),
                (0, [F, F, F, T]),
            ],
            PhysicalGate::CNOT => [
                (0, [T, F, T, F]),
                (0, [F, T, F, F]),
                (0, [F, F, T, F]),
                (0, [F, T, F, T]),
            ],
            _ => unreachable!("single-qubit gate"),
        }
    }
}

impl FromStr for PhysicalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "X" => PhysicalGate::X,
            "Y" => PhysicalGate::Y,
            "Z" => PhysicalGate::Z,
            "H" => PhysicalGate::H,
            "S" => PhysicalGate::S,
            "S_DAG" => PhysicalGate::SDag,
            "SQRT_X" => PhysicalGate::SqrtX,
            "SQRT_X_DAG" => PhysicalGate::SqrtXDag,
            "C" => PhysicalGate::C,
            "C_PRIME" | "C'" => PhysicalGate::CPrime,
            "CZ" => PhysicalGate::CZ,
            "CNOT" | "CX" => PhysicalGate::CNOT,
            _ => return Err(Error::validation(format!("unsupported gate '{s}'"))),
        })
    }
}

/// One gate applied to 0-based qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateOp {
    pub gate: PhysicalGate,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CliffordSequence {
    pub ops: Vec<GateOp>,
}

impl CliffordSequence {
    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.iter().flat_map(|o| o.qubits.iter().copied()).max()
    }
}

/// Parses one gate per line, `NAME q1 q2 ...` with 1-based qubits. A line with
/// more targets than the gate's arity applies the gate to each target (or
/// target pair) in turn. `#` starts a comment.
pub fn parse_gate_sequence(text: &str) -> Result<CliffordSequence> {
    let mut ops = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let gate: PhysicalGate = toks.next().unwrap_or_default().parse()?;
        let qubits = toks
            .map(|t| match t.parse::<usize>() {
                Ok(q) if q >= 1 => Ok(q - 1),
                _ => Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad qubit index '{t}'"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = gate.arity();
        if qubits.is_empty() || qubits.len() % arity != 0 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("{} needs a multiple of {arity} targets", gate.name()),
            });
        }
        for chunk in qubits.chunks(arity) {
            if arity == 2 && chunk[0] == chunk[1] {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("{} on a repeated qubit", gate.name()),
                });
            }
            ops.push(GateOp {
                gate,
                qubits: chunk.to_vec(),
            });
        }
    }
    Ok(CliffordSequence { ops })
}

/// Conjugates `p` by one gate: `p ↦ U p U†`.
pub(crate) fn conjugate(p: &mut PauliOp, op: &GateOp) {
    match op.gate.arity() {
        1 => {
            let q = op.qubits[0];
            let (x, z) = (p.x(q), p.z(q));
            let [ix, iz] = op.gate.single_images();
            let mut acc = (0u8, false, false);
            for (bit, img) in [(x, ix), (z, iz)] {
                if bit {
                    let cross = acc.2 && img.1;
                    acc = (
                        acc.0 + img.0 + if cross { 2 } else { 0 },
                        acc.1 ^ img.1,
                        acc.2 ^ img.2,
                    );
                }
            }
            p.set(q, acc.1, acc.2);
            p.phase = (p.phase + acc.0) % 4;
        }
        _ => {
            let (a, b) = (op.qubits[0], op.qubits[1]);
            let bits = [p.x(a), p.z(a), p.x(b), p.z(b)];
            let imgs = op.gate.pair_images();
            let mut phase = 0u8;
            let mut acc = [false; 4];
            for (bit, (ph, img)) in bits.into_iter().zip(imgs) {
                if bit {
                    let cross = (acc[1] && img[0]) ^ (acc[3] && img[2]);
                    phase += ph + if cross { 2 } else { 0 };
                    for (s, v) in acc.iter_mut().zip(img) {
                        *s ^= v;
                    }
                }
            }
            p.set(a, acc[0], acc[1]);
            p.set(b, acc[2], acc[3]);
            p.phase = (p.phase + phase) % 4;
        }
    }
}

/// The logical Clifford a sequence is claimed to implement (1-based logical indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalCliffordName {
    Identity,
    X(usize),
    Z(usize),
    H(usize),
    S(usize),
    /// `CNOT(control, target)`.
    CNOT(usize, usize),
    CZ(usize, usize),
}

impl FromStr for LogicalCliffordName {
    type Err = Error;

    /// `I`, `H:1`, `S:2`, `CNOT:1,2`, `CZ:1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("bad logical gate claim '{s}'"));
        let s = s.trim();
        if s.eq_ignore_ascii_case("I") {
            return Ok(LogicalCliffordName::Identity);
        }
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let idx: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>().ok().filter(|&v| v >= 1))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        Ok(match (name.to_ascii_uppercase().as_str(), idx.as_slice()) {
            ("X", [i]) => LogicalCliffordName::X(*i),
            ("Z", [i]) => LogicalCliffordName::Z(*i),
            ("H", [i]) => LogicalCliffordName::H(*i),
            ("S", [i]) => LogicalCliffordName::S(*i),
            ("CNOT" | "CX", [c, t]) if c != t => LogicalCliffordName::CNOT(*c, *t),
            ("CZ", [a, b]) if a != b => LogicalCliffordName::CZ(*a, *b),
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for LogicalCliffordName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicalCliffordName::Identity => f.write_str("I"),
            LogicalCliffordName::X(i) => write!(f, "X:{i}"),
            LogicalCliffordName::Z(i) => write!(f, "Z:{i}"),
            LogicalCliffordName::H(i) => write!(f, "H:{i}"),
            LogicalCliffordName::S(i) => write!(f, "S:{i}"),
            LogicalCliffordName::CNOT(c, t) => write!(f, "CNOT:{c},{t}"),
            LogicalCliffordName::CZ(a, b) => write!(f, "CZ:{a},{b}"),
        }
    }
}

impl LogicalCliffordName {
    fn max_index(&self) -> usize {
        match *self {
            LogicalCliffordName::Identity => 0,
            LogicalCliffordName::X(i)
            | LogicalCliffordName::Z(i)
            | LogicalCliffordName::H(i)
            | LogicalCliffordName::S(i) => i,
            LogicalCliffordName::CNOT(a, b) | LogicalCliffordName::CZ(a, b) => a.max(b),
        }
    }

    /// Symplectic action on `k` logical qubits. Row `r` is the image of basis
    /// element `r` in the order `X_1..X_k, Z_1..Z_k`, written in the same order.
    pub fn symplectic_map(&self, k: usize) -> Result<BitMatrix> {
        if self.max_index() > k {
            return Err(Error::shape(format!("claim {self} on a code with k={k}")));
        }
        let mut m = BitMatrix::identity(2 * k);
        let (xr, zr) = (|i: usize| i - 1, |i: usize| k + i - 1);
        match *self {
            LogicalCliffordName::Identity | LogicalCliffordName::X(_) | LogicalCliffordName::Z(_) => {}
            LogicalCliffordName::H(i) => {
                m.set(xr(i), xr(i), false);
                m.set(xr(i), zr(i), true);
                m.set(zr(i), zr(i), false);
                m.set(zr(i), xr(i), true);
            }
            LogicalCliffordName::S(i) => m.set(xr(i), zr(i), true),
            LogicalCliffordName::CNOT(c, t) => {
                m.set(xr(c), xr(t), true);
                m.set(zr(t), zr(c), true);
            }
            LogicalCliffordName::CZ(a, b) => {
                m.set(xr(a), zr(b), true);
                m.set(xr(b), zr(a), true);
            }
        }
        Ok(m)
    }
}

/// Outcome of checking a physical sequence against a claimed logical gate.
#[derive(Clone, Debug)]
pub struct GateReport {
    /// Every stabilizer generator maps into the stabilizer group.
    pub stabilizers_preserved: bool,
    /// Every logical maps into the centralizer and is a combination of the
    /// basis up to stabilizers.
    pub logicals_well_defined: bool,
    pub induced_map: BitMatrix,
    pub expected_map: BitMatrix,
    /// Induced action equals the claimed one up to stabilizers and Pauli factors.
    pub matches: bool,
    /// Conjugated logicals in the order `X_L1..X_Lk, Z_L1..Z_Lk`; their phases
    /// are the reported Pauli frame.
    pub logical_images: Vec<PauliOp>,
}

/// Conjugates the stabilizers and logical basis through `circuit` and compares
/// the induced symplectic action with `claimed`.
pub fn verify_logical_gate(
    code: &StabilizerCode,
    basis: &LogicalBasis,
    circuit: &CliffordSequence,
    claimed: LogicalCliffordName,
) -> Result<GateReport> {
    if let Some(q) = circuit.max_qubit() {
        if q >= code.n {
            return Err(Error::shape(format!(
                "gate on qubit {} but the code has {} qubits",
                q + 1,
                code.n
            )));
        }
    }
    let k = basis.k();
    let expected_map = claimed.symplectic_map(k)?;
    let run = |p: &PauliOp| {
        let mut p = p.clone();
        for op in &circuit.ops {
            conjugate(&mut p, op);
        }
        p
    };

    let space = stabilizer_space(code);
    let stabilizers_preserved = stabilizer_generators(code)
        .iter()
        .all(|s| space.contains(run(s).symplectic().row_words(0)));

    let ops = basis.ordered();
    let mut induced_map = BitMatrix::zeros(2 * k, 2 * k);
    let mut logicals_well_defined = true;
    let mut logical_images = Vec::with_capacity(2 * k);
    for (r, op) in ops.iter().enumerate() {
        let img = run(op);
        let mut residual = img.clone();
        for j in 0..k {
            // Coefficient of X_Lj is detected by Z_Lj and vice versa.
            if img.sp(basis.z(j)) {
                induced_map.set(r, j, true);
                residual = residual.mul(basis.x(j))?;
            }
            if img.sp(basis.x(j)) {
                induced_map.set(r, k + j, true);
                residual = residual.mul(basis.z(j))?;
            }
        }
        if !space.contains(residual.symplectic().row_words(0)) {
            logicals_well_defined = false;
        }
        logical_images.push(img);
    }
    let matches = stabilizers_preserved && logicals_well_defined && induced_map == expected_map;
    Ok(GateReport {
        stabilizers_preserved,
        logicals_well_defined,
        induced_map,
        expected_map,
        matches,
        logical_images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::named_code;

    fn conj(gate: PhysicalGate, pauli: &str) -> String {
        let mut p = PauliOp::parse(1, pauli).unwrap();
        conjugate(&mut p, &GateOp { gate, qubits: vec![0] });
        p.to_string()
    }

    #[test]
    fn single_qubit_tables() {
        use PhysicalGate::*;
        let cases = [
            (H, "X1", "Z1"),
            (H, "Y1", "-Y1"),
            (S, "X1", "Y1"),
            (S, "Y1", "-X1"),
            (SDag, "X1", "-Y1"),
            (SqrtX, "Z1", "-Y1"),
            (SqrtX, "Y1", "Z1"),
            (SqrtXDag, "Z1", "Y1"),
            (X, "Z1", "-Z1"),
            (Y, "X1", "-X1"),
            (Z, "Y1", "-Y1"),
            (C, "X1", "Y1"),
            (C, "Z1", "X1"),
            (C, "Y1", "Z1"),
            (CPrime, "X1", "-Z1"),
            (CPrime, "Z1", "-Y1"),
        ];
        for (g, a, b) in cases {
            assert_eq!(conj(g, a), b, "{g:?} on {a}");
        }
    }

    #[test]
    fn c_and_c_prime_are_inverse() {
        for s in ["X1", "Y1", "Z1"] {
            let mut p = PauliOp::parse(1, s).unwrap();
            conjugate(&mut p, &GateOp { gate: PhysicalGate::C, qubits: vec![0] });
            conjugate(&mut p, &GateOp { gate: PhysicalGate::CPrime, qubits: vec![0] });
            assert_eq!(p.x(0), s != "Z1");
            assert_eq!(p.z(0), s != "X1");
        }
    }

    #[test]
    fn two_qubit_tables() {
        let run = |gate, s: &str| {
            let mut p = PauliOp::parse(2, s).unwrap();
            conjugate(&mut p, &GateOp { gate, qubits: vec![0, 1] });
            p.to_string()
        };
        assert_eq!(run(PhysicalGate::CZ, "X1"), "X1 Z2");
        assert_eq!(run(PhysicalGate::CZ, "Y1"), "Y1 Z2");
        assert_eq!(run(PhysicalGate::CZ, "X1 X2"), "Y1 Y2");
        assert_eq!(run(PhysicalGate::CNOT, "X1"), "X1 X2");
        assert_eq!(run(PhysicalGate::CNOT, "Z2"), "Z1 Z2");
        assert_eq!(run(PhysicalGate::CNOT, "Y1"), "Y1 X2");
        assert_eq!(run(PhysicalGate::CNOT, "Z1"), "Z1");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_gate_sequence("FOO 1"), Err(Error::Validation(_))));
        assert!(matches!(parse_gate_sequence("CZ 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_gate_sequence("H 0"), Err(Error::Parse { .. })));
        let seq = parse_gate_sequence("# comment\nH 2\nCZ 1 2 3 4\nC' 5").unwrap();
        assert_eq!(seq.ops.len(), 4);
        assert_eq!(seq.ops[2].qubits, vec![2, 3]);
        assert_eq!(seq.ops[3].gate, PhysicalGate::CPrime);
    }

    #[test]
    fn out_of_range_qubit_is_shape_error() {
        let code = named_code("tb12").unwrap();
        let basis = crate::logicals::logical_basis(&code);
        let seq = parse_gate_sequence("H 13").unwrap();
        let err = verify_logical_gate(&code, &basis, &seq, LogicalCliffordName::Identity).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let code = named_code("tb12").unwrap();
        let basis = crate::logicals::logical_basis(&code);
        let r = verify_logical_gate(&code, &basis, &CliffordSequence::default(), LogicalCliffordName::Identity)
            .unwrap();
        assert!(r.matches);
        assert_eq!(r.induced_map, BitMatrix::identity(4));
    }

    #[test]
    fn transversal_logical_pauli_is_identity_map() {
        let code = named_code("tb12").unwrap();
        let basis = crate::logicals::logical_basis(&code);
        let seq = parse_gate_sequence("X 1 2 3").unwrap();
        let r = verify_logical_gate(&code, &basis, &seq, "X:1".parse().unwrap()).unwrap();
        assert!(r.matches);
    }

    #[test]
    fn claim_parsing() {
        assert_eq!("H:1".parse::<LogicalCliffordName>().unwrap(), LogicalCliffordName::H(1));
        assert_eq!(
            "CNOT:2,1".parse::<LogicalCliffordName>().unwrap(),
            LogicalCliffordName::CNOT(2, 1)
        );
        assert!("CNOT:1,1".parse::<LogicalCliffordName>().is_err());
        assert!("H:0".parse::<LogicalCliffordName>().is_err());
    }
}
