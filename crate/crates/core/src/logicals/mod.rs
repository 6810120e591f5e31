//! Pauli operators, logical operator bases and logical-gate verification.

mod gates;

use std::fmt;

use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::f2la::{dot_words, weight_words, BitMatrix, Echelon};
use crate::Basis;

pub use gates::{
    parse_gate_sequence, verify_logical_gate, CliffordSequence, GateOp, GateReport,
    LogicalCliffordName, PhysicalGate,
};

/// An n-qubit Pauli operator `i^phase · X^x · Z^z`.
///
/// The phase counts powers of `i` in front of the X-then-Z product, so the
/// Hermitian operator `Y = iXZ` has phase 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub n: usize,
    pub x_part: BitMatrix,
    pub z_part: BitMatrix,
    pub phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x_part: BitMatrix::zeros(1, n),
            z_part: BitMatrix::zeros(1, n),
            phase: 0,
        }
    }

    /// Hermitian Pauli with X on `xs` and Z on `zs` (0-based); overlaps become Y.
    pub fn from_supports(n: usize, xs: &[usize], zs: &[usize]) -> Result<Self> {
        let x_part = BitMatrix::row_vector(n, xs)?;
        let z_part = BitMatrix::row_vector(n, zs)?;
        let mut p = Self {
            n,
            x_part,
            z_part,
            phase: 0,
        };
        p.phase = p.y_count() as u8 % 4;
        Ok(p)
    }

    pub fn x_type(n: usize, support: &[usize]) -> Result<Self> {
        Self::from_supports(n, support, &[])
    }

    pub fn z_type(n: usize, support: &[usize]) -> Result<Self> {
        Self::from_supports(n, &[], support)
    }

    /// Parses `"X1 X2 X3"`, `"-Y2 Z4"` or `"I"` with 1-based qubit indices.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut text = text.trim();
        let mut negative = false;
        if let Some(rest) = text.strip_prefix('-') {
            negative = true;
            text = rest.trim_start();
        } else if let Some(rest) = text.strip_prefix('+') {
            text = rest.trim_start();
        }
        let mut p = Self::identity(n);
        for tok in text.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let (kind, idx) = tok.split_at(1);
            let q: usize = idx
                .parse()
                .map_err(|_| Error::validation(format!("bad Pauli token '{tok}'")))?;
            if q == 0 || q > n {
                return Err(Error::shape(format!("qubit {q} out of range 1..={n}")));
            }
            let single = match kind {
                "X" => Self::from_supports(n, &[q - 1], &[])?,
                "Y" => Self::from_supports(n, &[q - 1], &[q - 1])?,
                "Z" => Self::from_supports(n, &[], &[q - 1])?,
                _ => return Err(Error::validation(format!("bad Pauli token '{tok}'"))),
            };
            p = p.mul(&single)?;
        }
        p.phase = (p.phase + if negative { 2 } else { 0 }) % 4;
        Ok(p)
    }

    pub fn x(&self, q: usize) -> bool {
        self.x_part.get(0, q)
    }

    pub fn z(&self, q: usize) -> bool {
        self.z_part.get(0, q)
    }

    pub(crate) fn set(&mut self, q: usize, x: bool, z: bool) {
        self.x_part.set(0, q, x);
        self.z_part.set(0, q, z);
    }

    fn y_count(&self) -> usize {
        self.x_part
            .row_words(0)
            .iter()
            .zip(self.z_part.row_words(0))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn weight(&self) -> usize {
        self.x_part
            .row_words(0)
            .iter()
            .zip(self.z_part.row_words(0))
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x_part.is_zero() && self.z_part.is_zero()
    }

    /// Sign of the operator relative to its Hermitian form: 0 → +1, 1 → +i, 2 → −1, 3 → −i.
    pub fn sign(&self) -> u8 {
        ((self.phase as usize + 4 - self.y_count() % 4) % 4) as u8
    }

    /// Symplectic product `x₁·z₂ + z₁·x₂`; zero iff the operators commute.
    pub fn sp(&self, other: &PauliOp) -> bool {
        dot_words(self.x_part.row_words(0), other.z_part.row_words(0))
            ^ dot_words(self.z_part.row_words(0), other.x_part.row_words(0))
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        !self.sp(other)
    }

    /// Operator product `self · other`, phase included.
    pub fn mul(&self, other: &PauliOp) -> Result<PauliOp> {
        if self.n != other.n {
            return Err(Error::shape(format!("Pauli sizes {} and {}", self.n, other.n)));
        }
        let swap = dot_words(self.z_part.row_words(0), other.x_part.row_words(0));
        Ok(PauliOp {
            n: self.n,
            x_part: self.x_part.add(&other.x_part)?,
            z_part: self.z_part.add(&other.z_part)?,
            phase: (self.phase + other.phase + if swap { 2 } else { 0 }) % 4,
        })
    }

    /// `(x | z)` as a 1×2n row.
    pub fn symplectic(&self) -> BitMatrix {
        self.x_part.hstack(&self.z_part).expect("equal rows")
    }

    /// Hermitian operator from a `(x | z)` row of length 2n.
    pub fn from_symplectic(v: &BitMatrix) -> Result<Self> {
        if v.rows() != 1 || v.cols() % 2 != 0 {
            return Err(Error::shape(format!("symplectic vector of shape {:?}", v.shape())));
        }
        let n = v.cols() / 2;
        let mut p = Self {
            n,
            x_part: v.col_slice(0, n),
            z_part: v.col_slice(n, 2 * n),
            phase: 0,
        };
        p.phase = p.y_count() as u8 % 4;
        Ok(p)
    }

    /// 0-based qubits where the operator acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x(q) || self.z(q)).collect()
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.sign() as usize];
        f.write_str(prefix)?;
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in self.support() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let c = match (self.x(q), self.z(q)) {
                (true, true) => 'Y',
                (true, false) => 'X',
                _ => 'Z',
            };
            write!(f, "{c}{}", q + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

/// Symplectic pairs `(X_Li, Z_Li)` of logical operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalBasis {
    pub pairs: Vec<(PauliOp, PauliOp)>,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn x(&self, i: usize) -> &PauliOp {
        &self.pairs[i].0
    }

    pub fn z(&self, i: usize) -> &PauliOp {
        &self.pairs[i].1
    }

    /// Builds a basis from 1-based Pauli strings, one `(X_L, Z_L)` pair per entry.
    pub fn parse(n: usize, pairs: &[(&str, &str)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|(x, z)| Ok((PauliOp::parse(n, x)?, PauliOp::parse(n, z)?)))
            .collect::<Result<_>>()?;
        Ok(Self { pairs })
    }

    /// One `X representative ; Z representative` line per logical qubit, with
    /// `#` comments.
    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let (x, z) = line
                .split_once(';')
                .ok_or_else(|| perr("expected 'X part ; Z part'".into()))?;
            let op = |s: &str| PauliOp::parse(n, s).map_err(|e| perr(e.to_string()));
            pairs.push((op(x)?, op(z)?));
        }
        Ok(Self { pairs })
    }

    /// Logical representatives of the given Pauli type.
    pub fn of_type(&self, basis: Basis) -> Vec<&PauliOp> {
        self.pairs
            .iter()
            .map(|(x, z)| if basis == Basis::X { x } else { z })
            .collect()
    }

    /// Operators in the order `X_L1..X_Lk, Z_L1..Z_Lk`.
    pub fn ordered(&self) -> Vec<&PauliOp> {
        let mut v = self.of_type(Basis::X);
        v.extend(self.of_type(Basis::Z));
        v
    }
}

/// Stabilizer generators as Pauli operators: X rows first, then Z rows.
pub fn stabilizer_generators(code: &StabilizerCode) -> Vec<PauliOp> {
    let mut out = Vec::with_capacity(code.h_x.rows() + code.h_z.rows());
    for r in 0..code.h_x.rows() {
        out.push(PauliOp::x_type(code.n, &code.h_x.row_support(r)).expect("in range"));
    }
    for r in 0..code.h_z.rows() {
        out.push(PauliOp::z_type(code.n, &code.h_z.row_support(r)).expect("in range"));
    }
    out
}

/// Stabilizer group as a row space of `(x | z)` vectors.
pub(crate) fn stabilizer_space(code: &StabilizerCode) -> Echelon {
    let n = code.n;
    let xs = code.h_x.hstack(&BitMatrix::zeros(code.h_x.rows(), n)).expect("rows");
    let zs = BitMatrix::zeros(code.h_z.rows(), n).hstack(&code.h_z).expect("rows");
    xs.vstack(&zs).expect("cols").rref()
}

/// Generators of the centralizer `C(S)`: the kernel of `[[0, H_X], [H_Z, 0]]`
/// acting on `(x | z)`. The kernel splits into pure X and pure Z vectors.
pub fn centralizer_basis(code: &StabilizerCode) -> Vec<PauliOp> {
    let n = code.n;
    let top = BitMatrix::zeros(code.h_x.rows(), n).hstack(&code.h_x).expect("rows");
    let bottom = code.h_z.hstack(&BitMatrix::zeros(code.h_z.rows(), n)).expect("rows");
    let ns = top.vstack(&bottom).expect("cols").nullspace();
    (0..ns.rows())
        .map(|r| PauliOp::from_symplectic(&ns.row(r)).expect("even length"))
        .collect()
}

/// Bits of a symplectic row in index order, for lexicographic sorting.
fn lex_key(p: &PauliOp) -> Vec<bool> {
    let v = p.symplectic();
    (0..v.cols()).map(|c| v.get(0, c)).collect()
}

/// Canonical logical basis: centralizer generators are taken in ascending
/// lexicographic order, those independent of the stabilizers (and of earlier
/// picks) survive, and symplectic Gram-Schmidt pairs the survivors.
/// Representatives are then reduced to minimum weight within their
/// stabilizer coset when the stabilizer group is small enough to enumerate.
pub fn logical_basis(code: &StabilizerCode) -> LogicalBasis {
    let mut gens = centralizer_basis(code);
    gens.sort_by_cached_key(lex_key);

    let stab = stabilizer_space(code);
    let mut span = stab.basis.clone();
    let mut rank = stab.rank();
    let mut survivors = Vec::new();
    for g in gens {
        let v = g.symplectic();
        let mut trial = span.clone();
        trial.push_row_words(v.row_words(0));
        let r = trial.rank();
        if r > rank {
            span = trial;
            rank = r;
            survivors.push(g);
        }
    }

    let mut pairs = Vec::new();
    while !survivors.is_empty() {
        let a = survivors.remove(0);
        let Some(j) = survivors.iter().position(|c| a.sp(c)) else {
            // Cannot happen for a genuine quotient C(S)/S; drop defensively.
            continue;
        };
        let b = survivors.remove(j);
        for c in survivors.iter_mut() {
            let mut next = c.clone();
            if c.sp(&b) {
                next = next.mul(&a).expect("same n");
            }
            if c.sp(&a) {
                next = next.mul(&b).expect("same n");
            }
            next.phase = next.y_count() as u8 % 4;
            *c = next;
        }
        let a_is_x = a.z_part.is_zero();
        pairs.push(if a_is_x { (a, b) } else { (b, a) });
    }

    for (x, z) in pairs.iter_mut() {
        *x = minimize_in_coset(x, &code.h_x, Basis::X);
        *z = minimize_in_coset(z, &code.h_z, Basis::Z);
    }
    LogicalBasis { pairs }
}

const COSET_ENUMERATION_LIMIT: usize = 20;

/// Lightest element of `p + rs(h)` for pure operators, when `rs(h)` is small
/// enough to enumerate; otherwise `p` unchanged.
fn minimize_in_coset(p: &PauliOp, h: &BitMatrix, basis: Basis) -> PauliOp {
    let part = match basis {
        Basis::X if p.z_part.is_zero() => &p.x_part,
        Basis::Z if p.x_part.is_zero() => &p.z_part,
        _ => return p.clone(),
    };
    let gens = h.rref().basis;
    if gens.rows() > COSET_ENUMERATION_LIMIT {
        return p.clone();
    }
    let mut v = part.row_words(0).to_vec();
    let mut best = v.clone();
    let mut best_w = weight_words(&v);
    for i in 1u64..(1u64 << gens.rows()) {
        let flip = i.trailing_zeros() as usize;
        for (a, b) in v.iter_mut().zip(gens.row_words(flip)) {
            *a ^= b;
        }
        let w = weight_words(&v);
        if w < best_w {
            best_w = w;
            best.copy_from_slice(&v);
        }
    }
    let support = crate::f2la::support_of(&best);
    match basis {
        Basis::X => PauliOp::x_type(p.n, &support),
        Basis::Z => PauliOp::z_type(p.n, &support),
    }
    .expect("in range")
}

/// True iff the basis is a valid set of symplectic logical pairs for `code`.
pub fn verify_logical_basis(code: &StabilizerCode, basis: &LogicalBasis) -> Result<bool> {
    for (x, z) in &basis.pairs {
        for p in [x, z] {
            if p.n != code.n {
                return Err(Error::shape(format!(
                    "logical on {} qubits for a code on {}",
                    p.n, code.n
                )));
            }
        }
    }
    if basis.k() != code.k {
        return Ok(false);
    }
    let stabs = stabilizer_generators(code);
    let space = stabilizer_space(code);
    let ops = basis.ordered();
    let k = basis.k();
    for (i, a) in ops.iter().enumerate() {
        if stabs.iter().any(|s| a.sp(s)) {
            return Ok(false);
        }
        if space.contains(a.symplectic().row_words(0)) {
            return Ok(false);
        }
        for (j, b) in ops.iter().enumerate() {
            let paired = (i + k == j) || (j + k == i);
            if a.sp(b) != paired {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether two operators differ by an element of the stabilizer group (up to phase).
pub fn equivalent_mod_stabilizers(code: &StabilizerCode, a: &PauliOp, b: &PauliOp) -> Result<bool> {
    let d = a.mul(b)?;
    Ok(stabilizer_space(code).contains(d.symplectic().row_words(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_rotated_surface_code, named_code, NAMED_CODES};

    fn reference_basis() -> LogicalBasis {
        LogicalBasis::parse(
            12,
            &[
                ("X1 X2 X3", "Z1 Z2 Z3 Z4 Z5 Z6"),
                ("X1 X2 X4 X5 X7 X10", "Z1 Z3 Z5 Z6 Z7"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn commutation_matches_matrix_multiplication() {
        // Exhaustive over all pairs of 2-qubit Paulis: compare sp with the
        // phase arithmetic of the product in both orders.
        let all: Vec<PauliOp> = (0..16u32)
            .map(|m| {
                let xs: Vec<usize> = (0..2).filter(|q| m >> q & 1 == 1).collect();
                let zs: Vec<usize> = (0..2).filter(|q| m >> (q + 2) & 1 == 1).collect();
                PauliOp::from_supports(2, &xs, &zs).unwrap()
            })
            .collect();
        for a in &all {
            for b in &all {
                let ab = a.mul(b).unwrap();
                let ba = b.mul(a).unwrap();
                assert_eq!(ab.x_part, ba.x_part);
                let commute = ab.phase == ba.phase;
                assert_eq!(commute, a.commutes_with(b), "{a} {b}");
            }
        }
    }

    #[test]
    fn y_is_ixz() {
        let y = PauliOp::parse(1, "Y1").unwrap();
        assert_eq!(y.phase, 1);
        assert_eq!(y.sign(), 0);
        let yy = y.mul(&y).unwrap();
        assert!(yy.is_identity());
        assert_eq!(yy.sign(), 0);
        assert_eq!(PauliOp::parse(3, "-X1 Z3").unwrap().to_string(), "-X1 Z3");
    }

    #[test]
    fn centralizer_dimension_is_n_plus_k() {
        let code = named_code("tb12").unwrap();
        let gens = centralizer_basis(&code);
        let mut m = BitMatrix::zeros(0, 24);
        for g in &gens {
            m.push_row_words(g.symplectic().row_words(0));
        }
        assert_eq!(m.rank(), 14);
        let stabs = stabilizer_generators(&code);
        for s in stabs.iter().take(6) {
            let mut t = m.clone();
            t.push_row_words(s.symplectic().row_words(0));
            assert_eq!(t.rank(), 14);
        }
    }

    #[test]
    fn trivial_code_centralizer_is_everything() {
        let code =
            StabilizerCode::from_checks("triv", BitMatrix::zeros(0, 1), BitMatrix::zeros(0, 1))
                .unwrap();
        assert_eq!(centralizer_basis(&code).len(), 2);
    }

    #[test]
    fn reference_basis_verifies() {
        let code = named_code("tb12").unwrap();
        assert!(verify_logical_basis(&code, &reference_basis()).unwrap());
    }

    #[test]
    fn alternative_x_l1_differs_by_stabilizer() {
        let code = named_code("tb12").unwrap();
        let a = PauliOp::parse(12, "X1 X2 X3").unwrap();
        let b = PauliOp::parse(12, "X4 X5 X6").unwrap();
        assert!(equivalent_mod_stabilizers(&code, &a, &b).unwrap());
        let d = a.mul(&b).unwrap();
        assert!(code.h_x.in_rowspace(&d.x_part).unwrap());
    }

    #[test]
    fn broken_bases_fail() {
        let code = named_code("tb12").unwrap();
        let mut b = reference_basis();
        b.pairs[0].0 = PauliOp::x_type(12, &code.h_x.row_support(0)).unwrap();
        assert!(!verify_logical_basis(&code, &b).unwrap());

        let mut b = reference_basis();
        let x0 = b.pairs[0].0.clone();
        b.pairs[0].0 = b.pairs[1].0.clone();
        b.pairs[1].0 = x0;
        assert!(!verify_logical_basis(&code, &b).unwrap());

        let b = LogicalBasis::parse(5, &[("X1", "Z1")]).unwrap();
        assert!(matches!(verify_logical_basis(&code, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn computed_bases_verify_for_all_named_codes() {
        for name in NAMED_CODES {
            let code = named_code(name).unwrap();
            let basis = logical_basis(&code);
            assert_eq!(basis.k(), code.k, "{name}");
            assert!(verify_logical_basis(&code, &basis).unwrap(), "{name}");
            for (x, z) in &basis.pairs {
                assert!(x.z_part.is_zero() && z.x_part.is_zero(), "{name}");
            }
        }
    }

    #[test]
    fn surface_logicals_have_weight_three() {
        let code = build_rotated_surface_code(3).unwrap();
        let basis = logical_basis(&code);
        assert_eq!(basis.k(), 1);
        assert_eq!(basis.x(0).weight(), 3);
        assert_eq!(basis.z(0).weight(), 3);
    }

    #[test]
    fn zero_k_gives_empty_basis() {
        let code = StabilizerCode::from_checks(
            "full",
            BitMatrix::identity(2),
            BitMatrix::zeros(0, 2),
        )
        .unwrap();
        assert_eq!(code.k, 0);
        assert_eq!(logical_basis(&code).k(), 0);
    }
}
