use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::StabilizerCode;
use crate::error::{Error, Result};
use crate::f2la::{weight_words, BitMatrix, Echelon};
use crate::rng::stream_rng;
use crate::Basis;

/// Largest nullspace size (number of vectors) the exhaustive search will enumerate.
pub const DEFAULT_EXHAUSTION_CAP: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceEstimate {
    pub upper_bound: usize,
    pub exact: bool,
}

/// Spaces whose difference holds the logical operators of the given Pauli type:
/// Z-type logicals are `ns(H_X) \ rs(H_Z)`, X-type are `ns(H_Z) \ rs(H_X)`.
fn logical_spaces(code: &StabilizerCode, basis: Basis) -> (BitMatrix, Echelon) {
    match basis {
        Basis::Z => (code.h_x.nullspace(), code.h_z.rref()),
        Basis::X => (code.h_z.nullspace(), code.h_x.rref()),
    }
}

/// Exact minimum weight of a logical operator of the given Pauli type, by
/// Gray-code enumeration of the whole nullspace.
pub fn compute_distance_exact(code: &StabilizerCode, basis: Basis) -> Result<usize> {
    compute_distance_exact_with_cap(code, basis, DEFAULT_EXHAUSTION_CAP)
}

pub fn compute_distance_exact_with_cap(
    code: &StabilizerCode,
    basis: Basis,
    cap: u64,
) -> Result<usize> {
    let (gens, stabs) = logical_spaces(code, basis);
    let dim = gens.rows();
    if dim >= 64 || (1u64 << dim) > cap {
        return Err(Error::Capacity(format!(
            "nullspace of dimension {dim} exceeds the exhaustion cap of {cap} vectors; use the estimator"
        )));
    }
    if dim == stabs.rank() {
        return Err(Error::validation("code encodes no logical qubits"));
    }
    let mut v = vec![0u64; gens.row_words(0).len()];
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << dim) {
        let flip = i.trailing_zeros() as usize;
        for (a, b) in v.iter_mut().zip(gens.row_words(flip)) {
            *a ^= b;
        }
        let w = weight_words(&v);
        if w < best && !stabs.contains(&v) {
            best = w;
        }
    }
    Ok(best)
}

/// Code distance: minimum over both Pauli types.
pub fn code_distance_exact(code: &StabilizerCode) -> Result<usize> {
    Ok(compute_distance_exact(code, Basis::X)?.min(compute_distance_exact(code, Basis::Z)?))
}

fn fits_cap(code: &StabilizerCode, cap: u64) -> bool {
    let dims = [code.h_x.nullspace().rows(), code.h_z.nullspace().rows()];
    dims.iter().all(|&d| d < 64 && (1u64 << d) <= cap)
}

/// Upper bound on the distance by randomized information-set search; small
/// codes are routed to the exhaustive search and reported exact.
///
/// Each trial permutes the columns, row-reduces a nullspace basis so the
/// pivots land on a random information set, and scans the rows and pairwise
/// sums of the result for the lightest operator outside the stabilizer space.
/// The result depends only on `(code, trials, seed)`.
pub fn estimate_distance(code: &StabilizerCode, trials: usize, seed: u64) -> Result<DistanceEstimate> {
    estimate_distance_with_cap(code, trials, seed, DEFAULT_EXHAUSTION_CAP)
}

pub fn estimate_distance_with_cap(
    code: &StabilizerCode,
    trials: usize,
    seed: u64,
    cap: u64,
) -> Result<DistanceEstimate> {
    if trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    if code.k == 0 {
        return Err(Error::validation("code encodes no logical qubits"));
    }
    if fits_cap(code, cap) {
        return Ok(DistanceEstimate {
            upper_bound: code_distance_exact(code)?,
            exact: true,
        });
    }
    let mut best = usize::MAX;
    for (bi, basis) in [Basis::X, Basis::Z].into_iter().enumerate() {
        let (gens, stabs) = logical_spaces(code, basis);
        let found = (0..trials)
            .into_par_iter()
            .map(|t| isd_trial(&gens, &stabs, seed, (bi * trials + t) as u64))
            .min()
            .unwrap_or(usize::MAX);
        best = best.min(found);
    }
    Ok(DistanceEstimate {
        upper_bound: best,
        exact: false,
    })
}

fn isd_trial(gens: &BitMatrix, stabs: &Echelon, seed: u64, stream: u64) -> usize {
    let mut rng = stream_rng(seed, stream);
    let mut order: Vec<usize> = (0..gens.cols()).collect();
    order.shuffle(&mut rng);
    let ech = gens.rref_with_order(&order).basis;
    let rows = ech.rows();
    let mut best = usize::MAX;
    let consider = |v: &[u64], best: &mut usize| {
        let w = weight_words(v);
        if w > 0 && w < *best && !stabs.contains(v) {
            *best = w;
        }
    };
    let mut sum = vec![0u64; ech.row_words(0).len()];
    for i in 0..rows {
        consider(ech.row_words(i), &mut best);
        for j in i + 1..rows {
            for ((s, a), b) in sum.iter_mut().zip(ech.row_words(i)).zip(ech.row_words(j)) {
                *s = a ^ b;
            }
            consider(&sum, &mut best);
        }
    }
    best
}
