//! Ordering of the four entangling layers of a syndrome cycle.
//!
//! For TB codes every Z check touches its two left qubits in layers 1 and 4
//! and its two right qubits in layers 2 and 3; X checks do the mirror image
//! (right in 1 and 4, left in 2 and 3). The only freedom is which qubit of
//! each same-side pair goes first, one bit per (check, side). Both
//! requirements on those bits are linear over F₂:
//!
//! * no data qubit is used twice in one layer: of the two checks of one type
//!   that share a qubit on one side, exactly one uses it in the early slot;
//! * every overlapping X/Z check pair meets its shared qubits in a consistent
//!   order: the number of shared qubits reached by the X check first is even.
//!
//! So the scheduler solves a linear system instead of searching.

use super::{build_memory_circuit_with_schedule, NoiseModel};
use crate::codes::{CodeFamily, StabilizerCode};
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;
use crate::logicals::logical_basis;
use crate::sim::simulate_tableau;
use crate::Basis;

/// Data qubit touched by each check in layers 1..4 (`None`: idle in that layer).
/// Rows follow the rows of `H_X` and `H_Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub x_checks: Vec<[Option<usize>; 4]>,
    pub z_checks: Vec<[Option<usize>; 4]>,
}

impl Schedule {
    pub fn layers(&self) -> usize {
        4
    }

    /// `(check, data)` pairs of one check type in a layer (0-based).
    pub fn layer(&self, basis: Basis, layer: usize) -> Vec<(usize, usize)> {
        let checks = match basis {
            Basis::X => &self.x_checks,
            Basis::Z => &self.z_checks,
        };
        checks
            .iter()
            .enumerate()
            .filter_map(|(c, slots)| slots[layer].map(|q| (c, q)))
            .collect()
    }
}

/// One affine indicator `constant + variable` over F₂.
#[derive(Clone, Copy)]
struct Indicator {
    constant: bool,
    var: usize,
}

/// Sorted left and right supports of one check row.
fn split_row(h: &BitMatrix, r: usize, half: usize) -> Result<([usize; 2], [usize; 2])> {
    let s = h.row_support(r);
    let left: Vec<usize> = s.iter().copied().filter(|&q| q < half).collect();
    let right: Vec<usize> = s.iter().copied().filter(|&q| q >= half).collect();
    match (left.as_slice(), right.as_slice()) {
        (&[a, b], &[c, d]) => Ok(([a, b], [c, d])),
        _ => Err(Error::Scheduling(format!(
            "check {r} has {} left and {} right qubits; the bracketed schedule needs 2 + 2",
            left.len(),
            right.len()
        ))),
    }
}

struct System {
    nv: usize,
    rows: Vec<(Vec<usize>, bool, String)>,
}

impl System {
    fn push(&mut self, vars: Vec<usize>, rhs: bool, why: String) {
        self.rows.push((vars, rhs, why));
    }

    fn matrix(&self, upto: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(upto, self.nv + 1);
        for (i, (vars, rhs, _)) in self.rows[..upto].iter().enumerate() {
            for &v in vars {
                m.toggle(i, v);
            }
            m.set(i, self.nv, *rhs);
        }
        m
    }

    fn consistent(&self, upto: usize) -> bool {
        !self.matrix(upto).rref().pivots.contains(&self.nv)
    }

    /// Solution with all free variables zero, or the first equation that
    /// makes the system inconsistent.
    fn solve(&self) -> std::result::Result<Vec<bool>, usize> {
        let ech = self.matrix(self.rows.len()).rref();
        if ech.pivots.contains(&self.nv) {
            let (mut lo, mut hi) = (0, self.rows.len());
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.consistent(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Err(hi - 1);
        }
        let mut x = vec![false; self.nv];
        for (i, &p) in ech.pivots.iter().enumerate() {
            x[p] = ech.basis.get(i, self.nv);
        }
        Ok(x)
    }
}

/// A collision-free, commutation-consistent 4-layer schedule.
///
/// Rotated surface codes get the standard orders (X: NW, NE, SW, SE;
/// Z: NW, SW, NE, SE). TB-style codes (every check 2 left + 2 right) get
/// the bracketed (L,R,R,L) / (R,L,L,R) orders with the pair choices solved
/// as described in the module docs.
pub fn make_schedule(code: &StabilizerCode) -> Result<Schedule> {
    if let CodeFamily::RotatedSurface { x_faces, z_faces, .. } = &code.family {
        let order = |f: &crate::codes::Face, o: [usize; 4]| o.map(|i| f.corners[i]);
        return Ok(Schedule {
            x_checks: x_faces.iter().map(|f| order(f, [0, 1, 2, 3])).collect(),
            z_checks: z_faces.iter().map(|f| order(f, [0, 2, 1, 3])).collect(),
        });
    }
    let half = code.left_count.ok_or_else(|| {
        Error::Scheduling("no left/right partition; cannot build a bracketed schedule".into())
    })?;
    let (mx, mz) = (code.h_x.rows(), code.h_z.rows());
    let xs: Vec<_> = (0..mx).map(|r| split_row(&code.h_x, r, half)).collect::<Result<_>>()?;
    let zs: Vec<_> = (0..mz).map(|r| split_row(&code.h_z, r, half)).collect::<Result<_>>()?;

    // Variables: Z-left, Z-right, X-right, X-left pair choices, one per check.
    let (zl, zr, xr, xl) = (0, mz, 2 * mz, 2 * mz + mx);
    let early = |pair: [usize; 2], q: usize, var: usize| Indicator {
        constant: q == pair[0],
        var,
    };
    let mut sys = System {
        nv: 2 * mz + 2 * mx,
        rows: Vec::new(),
    };

    let groups: [(&str, &[([usize; 2], [usize; 2])], bool, usize); 4] = [
        ("Z-left", &zs, true, zl),
        ("Z-right", &zs, false, zr),
        ("X-right", &xs, false, xr),
        ("X-left", &xs, true, xl),
    ];
    for (label, checks, left, base) in groups {
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); code.n];
        for (c, (l, r)) in checks.iter().enumerate() {
            for &q in if left { l } else { r } {
                users[q].push(c);
            }
        }
        for (q, us) in users.iter().enumerate() {
            match us.as_slice() {
                [] | [_] => {}
                &[c1, c2] => {
                    let pair = |c: usize| if left { checks[c].0 } else { checks[c].1 };
                    let (a, b) = (early(pair(c1), q, base + c1), early(pair(c2), q, base + c2));
                    sys.push(
                        vec![a.var, b.var],
                        true ^ a.constant ^ b.constant,
                        format!("{label} collision on qubit {} (checks {c1}, {c2})", q + 1),
                    );
                }
                _ => {
                    return Err(Error::Scheduling(format!(
                        "qubit {} is in {} {label} checks; two slots cannot separate them",
                        q + 1,
                        us.len()
                    )))
                }
            }
        }
    }

    for (a, (xl_pair, xr_pair)) in xs.iter().enumerate() {
        for (b, (zl_pair, zr_pair)) in zs.iter().enumerate() {
            let mut vars = Vec::new();
            let mut rhs = false;
            let mut shared = 0;
            for &q in xl_pair {
                if zl_pair.contains(&q) {
                    // X first iff the Z check holds q back to layer 4.
                    let e = early(*zl_pair, q, zl + b);
                    vars.push(e.var);
                    rhs ^= !e.constant;
                    shared += 1;
                }
            }
            for &q in xr_pair {
                if zr_pair.contains(&q) {
                    // X first iff the X check uses q in layer 1.
                    let e = early(*xr_pair, q, xr + a);
                    vars.push(e.var);
                    rhs ^= e.constant;
                    shared += 1;
                }
            }
            if shared > 0 {
                sys.push(vars, rhs, format!("order of X check {a} and Z check {b}"));
            }
        }
    }

    let x = sys.solve().map_err(|i| {
        Error::Scheduling(format!(
            "no bracketed schedule exists: constraint '{}' contradicts the {} before it",
            sys.rows[i].2, i
        ))
    })?;
    let pick = |pair: [usize; 2], v: bool| if v { [pair[1], pair[0]] } else { pair };
    let z_checks = zs
        .iter()
        .enumerate()
        .map(|(c, (l, r))| {
            let (l, r) = (pick(*l, x[zl + c]), pick(*r, x[zr + c]));
            [Some(l[0]), Some(r[0]), Some(r[1]), Some(l[1])]
        })
        .collect();
    let x_checks = xs
        .iter()
        .enumerate()
        .map(|(c, (l, r))| {
            let (l, r) = (pick(*l, x[xl + c]), pick(*r, x[xr + c]));
            [Some(r[0]), Some(l[0]), Some(l[1]), Some(r[1])]
        })
        .collect();
    Ok(Schedule { x_checks, z_checks })
}

/// The adversarial interleaving: Z checks (L, L, R, R) and X checks
/// (R, R, L, L), derived from a valid bracketed schedule. It stays
/// collision-free but X and Z checks meet their shared qubits in
/// inconsistent orders.
pub fn bad_interleaved_schedule(code: &StabilizerCode) -> Result<Schedule> {
    let good = make_schedule(code)?;
    Ok(Schedule {
        z_checks: good.z_checks.iter().map(|s| [s[0], s[3], s[1], s[2]]).collect(),
        x_checks: good.x_checks.iter().map(|s| [s[0], s[3], s[1], s[2]]).collect(),
    })
}

fn shape_ok(code: &StabilizerCode, s: &Schedule) -> bool {
    if s.x_checks.len() != code.h_x.rows() || s.z_checks.len() != code.h_z.rows() {
        return false;
    }
    for (h, checks) in [(&code.h_x, &s.x_checks), (&code.h_z, &s.z_checks)] {
        for (r, slots) in checks.iter().enumerate() {
            let mut got: Vec<usize> = slots.iter().flatten().copied().collect();
            got.sort_unstable();
            if got != h.row_support(r) {
                return false;
            }
        }
    }
    for layer in 0..4 {
        let mut used = vec![false; code.n];
        for slots in s.x_checks.iter().chain(&s.z_checks) {
            if let Some(q) = slots[layer] {
                if std::mem::replace(&mut used[q], true) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff the schedule is shape-valid and a noiseless two-round memory
/// experiment in either basis has every detector and observable
/// deterministically zero.
pub fn validate_schedule(code: &StabilizerCode, s: &Schedule) -> bool {
    if !shape_ok(code, s) {
        return false;
    }
    let basis = logical_basis(code);
    [Basis::Z, Basis::X].into_iter().all(|mem| {
        let Ok(c) =
            build_memory_circuit_with_schedule(code, &basis, 2, NoiseModel::noiseless(), mem, s)
        else {
            return false;
        };
        let out = simulate_tableau(&c);
        out.detectors.iter().chain(&out.observables).all(|v| *v == Some(false))
    })
}
