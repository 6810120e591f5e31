//! Trivariate bicycle codes built from monomial sums, plus the rotated
//! surface code used as a baseline.

mod distance;
mod partition;
mod surface;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2la::BitMatrix;

pub use distance::{
    code_distance_exact, compute_distance_exact, compute_distance_exact_with_cap,
    estimate_distance, estimate_distance_with_cap, DistanceEstimate, DEFAULT_EXHAUSTION_CAP,
};
pub use partition::{check_left_right_partition, PartitionReport};
pub use surface::{build_rotated_surface_code, Face};

/// Which shift generator a monomial is a power of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `x = S_l ⊗ I_m`
    X,
    /// `y = I_l ⊗ S_m`
    Y,
    /// `z = S_l ⊗ S_m`
    Z,
}

impl Axis {
    pub fn symbol(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// A power of one of the generators. Power 0 is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub axis: Axis,
    pub power: u32,
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        axis: Axis::X,
        power: 0,
    };

    pub fn new(axis: Axis, power: u32) -> Self {
        Self { axis, power }
    }

    /// Exponent pair `(i, j)` with the monomial equal to `S_l^i ⊗ S_m^j`.
    pub fn canonical(&self, l: usize, m: usize) -> (usize, usize) {
        let p = self.power as usize;
        match self.axis {
            Axis::X => (p % l, 0),
            Axis::Y => (0, p % m),
            Axis::Z => (p % l, p % m),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => f.write_str("I"),
            1 => f.write_str(self.axis.symbol()),
            p => write!(f, "{}^{}", self.axis.symbol(), p),
        }
    }
}

/// Symbolic description of a trivariate bicycle code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct TBCodeSpec {
    pub l: usize,
    pub m: usize,
    pub a_terms: Vec<Monomial>,
    pub b_terms: Vec<Monomial>,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    l: usize,
    m: usize,
    a: Vec<(Axis, u32)>,
    b: Vec<(Axis, u32)>,
}

impl TryFrom<SpecFile> for TBCodeSpec {
    type Error = Error;

    fn try_from(f: SpecFile) -> Result<Self> {
        let conv = |v: Vec<(Axis, u32)>| v.into_iter().map(|(a, p)| Monomial::new(a, p)).collect();
        let spec = TBCodeSpec {
            l: f.l,
            m: f.m,
            a_terms: conv(f.a),
            b_terms: conv(f.b),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<TBCodeSpec> for SpecFile {
    fn from(s: TBCodeSpec) -> Self {
        let conv = |v: Vec<Monomial>| v.into_iter().map(|t| (t.axis, t.power)).collect();
        SpecFile {
            l: s.l,
            m: s.m,
            a: conv(s.a_terms),
            b: conv(s.b_terms),
        }
    }
}

impl TBCodeSpec {
    pub fn new(l: usize, m: usize, a_terms: Vec<Monomial>, b_terms: Vec<Monomial>) -> Result<Self> {
        let spec = Self {
            l,
            m,
            a_terms,
            b_terms,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.m == 0 {
            return Err(Error::validation(format!(
                "l and m must be positive (got l={}, m={})",
                self.l, self.m
            )));
        }
        for (name, terms) in [("A", &self.a_terms), ("B", &self.b_terms)] {
            if terms.is_empty() {
                return Err(Error::validation(format!("{name} has no terms")));
            }
            let mut seen = HashSet::new();
            for t in terms {
                if !seen.insert(t.canonical(self.l, self.m)) {
                    return Err(Error::validation(format!(
                        "{name} contains duplicate term {t} (terms cancel modulo 2)"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Sorted canonical exponent pairs of A and B; equal keys give identical codes.
    pub fn canonical_key(&self) -> (usize, usize, Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let key = |v: &[Monomial]| {
            let mut k: Vec<_> = v.iter().map(|t| t.canonical(self.l, self.m)).collect();
            k.sort_unstable();
            k
        };
        (self.l, self.m, key(&self.a_terms), key(&self.b_terms))
    }

    pub fn n(&self) -> usize {
        2 * self.l * self.m
    }
}

impl fmt::Display for TBCodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sum = |v: &[Monomial]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(
            f,
            "l={}, m={}, A = {}, B = {}",
            self.l,
            self.m,
            sum(&self.a_terms),
            sum(&self.b_terms)
        )
    }
}

/// Which matrix of the spec to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    A,
    B,
}

/// Σ terms of A or B as an `lm × lm` matrix.
pub fn build_matrix(spec: &TBCodeSpec, which: Which) -> Result<BitMatrix> {
    spec.validate()?;
    let (l, m) = (spec.l, spec.m);
    let terms = match which {
        Which::A => &spec.a_terms,
        Which::B => &spec.b_terms,
    };
    let (sl, sm) = (BitMatrix::shift(l), BitMatrix::shift(m));
    let mut acc = BitMatrix::zeros(l * m, l * m);
    for t in terms {
        let (i, j) = t.canonical(l, m);
        let term = sl.pow(i as u64)?.kron(&sm.pow(j as u64)?);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Code family, carrying whatever structure the circuit builders need.
#[derive(Clone, Debug, PartialEq)]
pub enum CodeFamily {
    Bicycle(TBCodeSpec),
    RotatedSurface { distance: usize, x_faces: Vec<Face>, z_faces: Vec<Face> },
    Generic,
}

/// Distance value and whether it is exact or only an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distance {
    pub value: usize,
    pub exact: bool,
}

/// A CSS stabilizer code.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    pub k: usize,
    pub distance: Option<Distance>,
    /// Number of left data qubits (TB codes only).
    pub left_count: Option<usize>,
    pub family: CodeFamily,
}

impl StabilizerCode {
    /// A CSS code from explicit check matrices; `k` is computed.
    pub fn from_checks(name: impl Into<String>, h_x: BitMatrix, h_z: BitMatrix) -> Result<Self> {
        if h_x.cols() != h_z.cols() {
            return Err(Error::shape(format!(
                "H_X has {} columns, H_Z has {}",
                h_x.cols(),
                h_z.cols()
            )));
        }
        let mut code = Self {
            name: name.into(),
            n: h_x.cols(),
            h_x,
            h_z,
            k: 0,
            distance: None,
            left_count: None,
            family: CodeFamily::Generic,
        };
        code.k = compute_k(&code);
        Ok(code)
    }

    /// `H_X · H_Zᵀ = 0`.
    pub fn is_css_commuting(&self) -> bool {
        self.h_x
            .matmul(&self.h_z.transpose())
            .map(|m| m.is_zero())
            .unwrap_or(false)
    }

    pub fn spec(&self) -> Option<&TBCodeSpec> {
        match &self.family {
            CodeFamily::Bicycle(s) => Some(s),
            _ => None,
        }
    }

    /// `[[n,k,d]]`, with `d` printed as `?` when unknown and `≤d` when only bounded.
    pub fn parameters(&self) -> String {
        let d = match self.distance {
            Some(Distance { value, exact: true }) => value.to_string(),
            Some(Distance { value, exact: false }) => format!("<={value}"),
            None => "?".into(),
        };
        format!("[[{},{},{}]]", self.n, self.k, d)
    }

    /// Check supports as 1-based Pauli strings, e.g. `Z1 Z3 Z8 Z10`.
    pub fn stabilizer_strings(&self) -> (Vec<String>, Vec<String>) {
        let render = |h: &BitMatrix, p: char| {
            (0..h.rows())
                .map(|r| {
                    h.row_support(r)
                        .iter()
                        .map(|q| format!("{p}{}", q + 1))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        };
        (render(&self.h_z, 'Z'), render(&self.h_x, 'X'))
    }
}

/// `H_X = [A | B]`, `H_Z = [Bᵀ | Aᵀ]`, `n = 2lm`.
pub fn build_code(spec: &TBCodeSpec) -> Result<StabilizerCode> {
    let a = build_matrix(spec, Which::A)?;
    let b = build_matrix(spec, Which::B)?;
    let h_x = a.hstack(&b)?;
    let h_z = b.transpose().hstack(&a.transpose())?;
    let half = spec.l * spec.m;
    let mut code = StabilizerCode {
        name: format!("tb{}", 2 * half),
        n: 2 * half,
        h_x,
        h_z,
        k: 0,
        distance: None,
        left_count: Some(half),
        family: CodeFamily::Bicycle(spec.clone()),
    };
    debug_assert!(code.is_css_commuting());
    code.k = compute_k(&code);
    Ok(code)
}

/// Number of logical qubits, `n − rank H_X − rank H_Z`, saturating at zero
/// for degenerate (non-commuting) inputs.
pub fn compute_k(code: &StabilizerCode) -> usize {
    k_from_ranks(code)
}

/// `dim[ns(H_X) ∩ ns(H_Z)]`, reported for diagnostics. For TB codes this is
/// not `k/2` in general (tb12 gives 4).
pub fn nullspace_intersection_dim(code: &StabilizerCode) -> usize {
    code.h_x
        .nullspace()
        .intersect_rowspaces(&code.h_z.nullspace())
        .expect("both nullspaces have n columns")
        .rows()
}

pub fn k_from_ranks(code: &StabilizerCode) -> usize {
    code.n
        .saturating_sub(code.h_x.rank() + code.h_z.rank())
}

/// Built-in codes by name: `tb12`, `tb24`, `tb56`, `tb88`, `surface3`, `surface5`, ...
pub fn named_code(name: &str) -> Result<StabilizerCode> {
    if let Some(spec) = named_spec(name) {
        let mut code = build_code(&spec)?;
        code.name = name.to_string();
        code.distance = known_distance(name);
        return Ok(code);
    }
    if let Some(d) = name.strip_prefix("surface").and_then(|d| d.parse().ok()) {
        return build_rotated_surface_code(d);
    }
    Err(Error::validation(format!("unknown built-in code '{name}'")))
}

/// Specs of the built-in TB codes.
pub fn named_spec(name: &str) -> Option<TBCodeSpec> {
    use Axis::*;
    let t = Monomial::new;
    let (l, m, a, b) = match name {
        "tb12" => (2, 3, vec![t(X, 1), t(Y, 2)], vec![t(X, 2), t(Z, 4)]),
        "tb24" => (4, 3, vec![t(X, 1), t(Z, 7)], vec![Monomial::IDENTITY, t(Y, 1)]),
        "tb56" => (4, 7, vec![t(Y, 6), t(Z, 22)], vec![t(Y, 1), t(Y, 2)]),
        "tb88" => (4, 11, vec![Monomial::IDENTITY, t(Z, 42)], vec![t(X, 1), t(Z, 1)]),
        _ => return None,
    };
    Some(TBCodeSpec::new(l, m, a, b).expect("built-in specs are valid"))
}

/// Distances of the built-in TB codes. tb56 and tb88 are too large for the
/// nullspace enumeration; their values are confirmed by exhaustive search
/// over low-weight vectors (see the `distances` integration test). tb88 is
/// usually quoted as distance 7, but its spec has weight-6 logical operators
/// of both types.
fn known_distance(name: &str) -> Option<Distance> {
    let (value, exact) = match name {
        "tb12" => (3, true),
        "tb24" => (3, true),
        "tb56" => (5, true),
        "tb88" => (6, true),
        _ => return None,
    };
    Some(Distance { value, exact })
}

pub const NAMED_CODES: &[&str] = &[
    "tb12", "tb24", "tb56", "tb88", "surface3", "surface5", "surface7",
];
