//! Matching-graph construction and minimum-weight perfect matching decoding.
//!
//! The detector error model is split into one graph per check basis. Each
//! graph has a node per detector of that basis plus a virtual boundary.
//! Decoding computes all-pairs shortest paths once, then for every syndrome
//! matches fired detectors to each other or to the boundary with an exact
//! blossom matcher.

mod blossom;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use crate::circuits::Circuit;
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;
use crate::logicals::LogicalBasis;
use crate::scalar::Real;
use crate::sim::{xor_prob, DetectorErrorModel};
use crate::Basis;

pub(crate) use blossom::max_weight_matching;

/// Observable masks are packed into one word.
pub const MAX_OBSERVABLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphEdge<T> {
    pub u: usize,
    /// `None` is the boundary.
    pub v: Option<usize>,
    pub probability: T,
    pub weight: T,
    pub observables: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchingGraph<T> {
    pub basis: Basis,
    /// Global detector id of each node.
    pub detectors: Vec<usize>,
    pub edges: Vec<GraphEdge<T>>,
}

/// `ln((1-p)/p)`, clamped at zero for `p >= 1/2`.
pub fn edge_weight<T: Real>(p: T) -> T {
    let half = T::of(0.5);
    if p >= half {
        T::zero()
    } else {
        ((T::one() - p) / p).ln()
    }
}

impl<T: Real> MatchingGraph<T> {
    pub fn num_nodes(&self) -> usize {
        self.detectors.len()
    }

    /// Graph from `(u, v, probability, observable mask)` entries. Parallel
    /// entries merge: probabilities combine as independent flips and the mask
    /// of the likeliest entry is kept.
    pub fn from_entries(
        basis: Basis,
        detectors: Vec<usize>,
        entries: impl IntoIterator<Item = (usize, Option<usize>, T, u64)>,
    ) -> Result<Self> {
        let n = detectors.len();
        let mut merged: BTreeMap<(usize, Option<usize>), (f64, f64, u64)> = BTreeMap::new();
        for (u, v, p, mask) in entries {
            if u >= n || v.is_some_and(|v| v >= n) {
                return Err(Error::shape(format!("edge ({u}, {v:?}) outside {n} nodes")));
            }
            if v == Some(u) {
                return Err(Error::validation(format!("self-loop on node {u}")));
            }
            let key = match v {
                Some(v) if v < u => (v, Some(u)),
                _ => (u, v),
            };
            let p = p.to_f64_lossy();
            let e = merged.entry(key).or_insert((0.0, -1.0, 0));
            e.0 = xor_prob(e.0, p);
            if p > e.1 {
                e.1 = p;
                e.2 = mask;
            }
        }
        let edges = merged
            .into_iter()
            .map(|((u, v), (p, _, mask))| {
                let p = T::of(p);
                GraphEdge {
                    u,
                    v,
                    probability: p,
                    weight: edge_weight(p),
                    observables: mask,
                }
            })
            .collect();
        Ok(Self {
            basis,
            detectors,
            edges,
        })
    }

    /// DIMACS-like dump: `p edge <nodes+1> <edges>` then `e u v weight mask`
    /// lines, with the boundary as node `nodes`.
    pub fn to_text(&self) -> String {
        let n = self.num_nodes();
        let mut s = format!("c basis {}\np edge {} {}\n", self.basis, n + 1, self.edges.len());
        for e in &self.edges {
            s += &format!("e {} {} {} {:#x}\n", e.u, e.v.unwrap_or(n), e.weight, e.observables);
        }
        s
    }
}

fn basis_of(coords: &[f64]) -> Basis {
    if coords.get(2) == Some(&1.0) {
        Basis::X
    } else {
        Basis::Z
    }
}

/// Basis of the detectors in round 0 (Z when there are none).
pub fn memory_basis(c: &Circuit) -> Basis {
    c.detectors()
        .iter()
        .find(|(_, co)| co.get(1) == Some(&0.0))
        .map_or(Basis::Z, |(_, co)| basis_of(co))
}

/// Splits the DEM into a Z-basis and an X-basis graph, in that order.
///
/// Detector basis comes from the third coordinate (1 = X, anything else = Z).
/// Observable masks are attached only in the memory basis, which is the basis
/// of the detectors in round 0; a Y-type fault contributes an edge to both
/// graphs but flips the observables once.
pub fn build_graphs<T: Real>(
    dem: &DetectorErrorModel<T>,
    c: &Circuit,
) -> Result<(MatchingGraph<T>, MatchingGraph<T>)> {
    let coords = c.detectors();
    if coords.len() != dem.num_detectors {
        return Err(Error::shape(format!(
            "model has {} detectors, circuit has {}",
            dem.num_detectors,
            coords.len()
        )));
    }
    if dem.num_observables > MAX_OBSERVABLES {
        return Err(Error::Capacity(format!(
            "{} observables exceed the {MAX_OBSERVABLES}-bit mask",
            dem.num_observables
        )));
    }
    let basis: Vec<Basis> = coords.iter().map(|(_, co)| basis_of(co)).collect();
    let memory = memory_basis(c);
    let mut local = vec![0usize; basis.len()];
    let mut nodes = [Vec::new(), Vec::new()];
    for (d, &b) in basis.iter().enumerate() {
        let g = (b == Basis::X) as usize;
        local[d] = nodes[g].len();
        nodes[g].push(d);
    }
    let mut entries: [Vec<(usize, Option<usize>, T, u64)>; 2] = [Vec::new(), Vec::new()];
    for m in &dem.mechanisms {
        let mask = m.observables.iter().fold(0u64, |a, &o| a | 1 << o);
        for (g, b) in [Basis::Z, Basis::X].into_iter().enumerate() {
            let ds: Vec<usize> = m.detectors.iter().copied().filter(|&d| basis[d] == b).collect();
            let mask = if b == memory { mask } else { 0 };
            match ds.as_slice() {
                [] => {}
                [u] => entries[g].push((local[*u], None, m.probability, mask)),
                [u, v] => entries[g].push((local[*u], Some(local[*v]), m.probability, mask)),
                _ => {
                    return Err(Error::Hypergraph(format!(
                        "mechanism flips {} {b}-basis detectors {:?}",
                        ds.len(),
                        ds
                    )))
                }
            }
        }
    }
    let [ez, ex] = entries;
    let [nz, nx] = nodes;
    Ok((
        MatchingGraph::from_entries(Basis::Z, nz, ez)?,
        MatchingGraph::from_entries(Basis::X, nx, ex)?,
    ))
}

/// Code-capacity graph: one node per check of `basis.other()` type, one unit
/// weight edge per data qubit (errors of Pauli type `basis`), with the mask
/// of opposite-type logical operators the qubit belongs to. Parallel edges
/// are collapsed, keeping the lowest qubit index. Also returns the qubit of
/// each edge.
pub fn code_capacity_graph<T: Real>(
    code: &StabilizerCode,
    basis: Basis,
    logicals: &LogicalBasis,
) -> Result<(MatchingGraph<T>, Vec<usize>)> {
    let detecting = logicals.of_type(basis.other());
    let h = match basis {
        Basis::X => &code.h_z,
        Basis::Z => &code.h_x,
    };
    let ht = h.transpose();
    let mut seen: BTreeMap<(usize, Option<usize>), usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for q in 0..code.n {
        let key = match ht.row_support(q).as_slice() {
            [] => continue,
            [u] => (*u, None),
            [u, v] => (*u, Some(*v)),
            s => {
                return Err(Error::Hypergraph(format!(
                    "qubit {q} is in {} checks",
                    s.len()
                )))
            }
        };
        if seen.contains_key(&key) {
            continue;
        }
        seen.insert(key, q);
        let mask = detecting.iter().enumerate().fold(0u64, |a, (i, l)| {
            let hit = match basis {
                Basis::X => l.z(q),
                Basis::Z => l.x(q),
            };
            a | (hit as u64) << i
        });
        edges.push(GraphEdge {
            u: key.0,
            v: key.1,
            // The probability whose weight ln((1-p)/p) is exactly 1.
            probability: T::of(1.0 / (1.0 + std::f64::consts::E)),
            weight: T::one(),
            observables: mask,
        });
    }
    let qubits = edges
        .iter()
        .map(|e| seen[&(e.u, e.v)])
        .collect();
    Ok((
        MatchingGraph {
            basis: basis.other(),
            detectors: (0..h.rows()).collect(),
            edges,
        },
        qubits,
    ))
}

#[derive(Clone, Copy, PartialEq)]
struct Entry<T>(T, usize);

impl<T: PartialOrd> Eq for Entry<T> {}

impl<T: PartialOrd> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl<T: PartialOrd> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of decoding one syndrome.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded<T> {
    pub observables: u64,
    pub weight: T,
    /// Matched pairs of node indices; `None` is the boundary.
    pub pairs: Vec<(usize, Option<usize>)>,
}

/// Precomputed shortest paths of a matching graph.
///
/// Paths never pass through the boundary; a node reaches the boundary via its
/// cheapest path to some boundary edge.
#[derive(Clone, Debug)]
pub struct MatchingDecoder<T> {
    n: usize,
    dist: Vec<T>,
    mask: Vec<u64>,
    /// Edge index into the predecessor node on the path from `s`, per `(s, v)`.
    pred: Vec<usize>,
    bdist: Vec<T>,
    bmask: Vec<u64>,
    /// `(boundary edge, node where it attaches)` per source.
    bexit: Vec<Option<(usize, usize)>>,
    edges: Vec<GraphEdge<T>>,
}

impl<T: Real> MatchingDecoder<T> {
    pub fn new(g: &MatchingGraph<T>) -> Self {
        let n = g.num_nodes();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, e) in g.edges.iter().enumerate() {
            if let Some(v) = e.v {
                adj[e.u].push((v, k));
                adj[v].push((e.u, k));
            }
        }
        let inf = T::infinity();
        let mut dist = vec![inf; n * n];
        let mut mask = vec![0u64; n * n];
        let mut pred = vec![usize::MAX; n * n];
        for s in 0..n {
            let row = s * n;
            dist[row + s] = T::zero();
            let mut heap = BinaryHeap::new();
            heap.push(Entry(T::zero(), s));
            while let Some(Entry(d, u)) = heap.pop() {
                if d > dist[row + u] {
                    continue;
                }
                for &(v, k) in &adj[u] {
                    let nd = d + g.edges[k].weight;
                    if nd < dist[row + v] {
                        dist[row + v] = nd;
                        mask[row + v] = mask[row + u] ^ g.edges[k].observables;
                        pred[row + v] = k;
                        heap.push(Entry(nd, v));
                    }
                }
            }
        }
        let mut bdist = vec![inf; n];
        let mut bmask = vec![0u64; n];
        let mut bexit = vec![None; n];
        for (k, e) in g.edges.iter().enumerate() {
            if e.v.is_some() {
                continue;
            }
            for s in 0..n {
                let d = dist[s * n + e.u] + e.weight;
                if d < bdist[s] {
                    bdist[s] = d;
                    bmask[s] = mask[s * n + e.u] ^ e.observables;
                    bexit[s] = Some((k, e.u));
                }
            }
        }
        Self {
            n,
            dist,
            mask,
            pred,
            bdist,
            bmask,
            bexit,
            edges: g.edges.clone(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Decodes a syndrome given as one flag per node.
    pub fn decode(&self, syndrome: &[bool]) -> Result<Decoded<T>> {
        if syndrome.len() != self.n {
            return Err(Error::shape(format!(
                "syndrome has {} bits, graph has {} nodes",
                syndrome.len(),
                self.n
            )));
        }
        let fired: Vec<usize> = (0..self.n).filter(|&i| syndrome[i]).collect();
        self.decode_fired(&fired)
    }

    /// Decodes given the sorted list of fired nodes.
    pub fn decode_fired(&self, fired: &[usize]) -> Result<Decoded<T>> {
        let n = self.n;
        let m = fired.len();
        let pair = |a: usize, b: usize| (self.dist[fired[a] * n + fired[b]], self.mask[fired[a] * n + fired[b]]);
        let bnd = |a: usize| (self.bdist[fired[a]], self.bmask[fired[a]]);
        let unmatched = || Error::Infeasible("fired detectors cannot be paired or matched to the boundary".into());
        match m {
            0 => {
                return Ok(Decoded {
                    observables: 0,
                    weight: T::zero(),
                    pairs: Vec::new(),
                })
            }
            1 => {
                let (w, mk) = bnd(0);
                if !w.is_finite() {
                    return Err(unmatched());
                }
                return Ok(Decoded {
                    observables: mk,
                    weight: w,
                    pairs: vec![(fired[0], None)],
                });
            }
            2 => {
                let (w01, m01) = pair(0, 1);
                let ((w0, m0), (w1, m1)) = (bnd(0), bnd(1));
                let split = w0 + w1;
                if w01.is_finite() && !(split < w01) {
                    return Ok(Decoded {
                        observables: m01,
                        weight: w01,
                        pairs: vec![(fired[0], Some(fired[1]))],
                    });
                }
                if split.is_finite() {
                    return Ok(Decoded {
                        observables: m0 ^ m1,
                        weight: split,
                        pairs: vec![(fired[0], None), (fired[1], None)],
                    });
                }
                return Err(unmatched());
            }
            _ => {}
        }
        // Fired node i and its boundary copy m + i; copies pair freely.
        let mut edges = Vec::new();
        let mut maxw = 0.0f64;
        for a in 0..m {
            for b in a + 1..m {
                let (w, _) = pair(a, b);
                if w.is_finite() {
                    maxw = maxw.max(w.to_f64_lossy());
                    edges.push((a, b, w.to_f64_lossy()));
                }
            }
            let (w, _) = bnd(a);
            if w.is_finite() {
                maxw = maxw.max(w.to_f64_lossy());
                edges.push((a, m + a, w.to_f64_lossy()));
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                edges.push((m + a, m + b, 0.0));
            }
        }
        let big = 2.0 * maxw + 1.0;
        for e in &mut edges {
            e.2 = big - e.2;
        }
        let mate = max_weight_matching(2 * m, &edges, true);
        let mut out = Decoded {
            observables: 0,
            weight: T::zero(),
            pairs: Vec::new(),
        };
        for a in 0..m {
            match mate[a] {
                Some(b) if b < m => {
                    if a < b {
                        let (w, mk) = pair(a, b);
                        out.weight += w;
                        out.observables ^= mk;
                        out.pairs.push((fired[a], Some(fired[b])));
                    }
                }
                Some(b) if b == m + a => {
                    let (w, mk) = bnd(a);
                    out.weight += w;
                    out.observables ^= mk;
                    out.pairs.push((fired[a], None));
                }
                _ => return Err(unmatched()),
            }
        }
        Ok(out)
    }

    /// Edge indices along the path used for one matched pair.
    pub fn path_edges(&self, u: usize, v: Option<usize>) -> Vec<usize> {
        let n = self.n;
        let mut out = Vec::new();
        let (s, mut t) = match v {
            Some(v) => (u, v),
            None => match self.bexit[u] {
                Some((k, at)) => {
                    out.push(k);
                    (u, at)
                }
                None => return out,
            },
        };
        while t != s {
            let k = self.pred[s * n + t];
            out.push(k);
            let e = &self.edges[k];
            t = if e.u == t { e.v.expect("internal edge") } else { e.u };
        }
        out
    }
}

/// One-shot decode: builds the shortest-path tables and decodes `syndrome`.
/// Returns the observable correction mask and the matching weight.
pub fn mwpm_decode<T: Real>(g: &MatchingGraph<T>, syndrome: &[bool]) -> Result<(u64, T)> {
    let d = MatchingDecoder::new(g).decode(syndrome)?;
    Ok((d.observables, d.weight))
}

/// Largest code size for [`brute_force_decode`].
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Minimum-weight error of Pauli type `basis` with the given syndrome
/// (checked against the opposite-type parity checks). Patterns are scanned
/// by increasing weight, then lexicographically.
pub fn brute_force_decode(code: &StabilizerCode, syndrome: &[bool], basis: Basis) -> Result<Vec<bool>> {
    let h = match basis {
        Basis::X => &code.h_z,
        Basis::Z => &code.h_x,
    };
    brute_force_with_checks(h, syndrome)
}

pub(crate) fn brute_force_with_checks(h: &BitMatrix, syndrome: &[bool]) -> Result<Vec<bool>> {
    let n = h.cols();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Capacity(format!(
            "brute-force decoding needs n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    if syndrome.len() != h.rows() {
        return Err(Error::shape(format!(
            "syndrome has {} bits, code has {} checks",
            syndrome.len(),
            h.rows()
        )));
    }
    let cols: Vec<u64> = (0..n)
        .map(|q| (0..h.rows()).fold(0u64, |a, r| a | (h.get(r, q) as u64) << r))
        .collect();
    let target = syndrome.iter().enumerate().fold(0u64, |a, (i, &s)| a | (s as u64) << i);
    let mut best: Option<u32> = None;
    for e in 0u32..(1u32 << n) {
        let s = (0..n).filter(|&q| e >> q & 1 == 1).fold(0u64, |a, q| a ^ cols[q]);
        if s != target {
            continue;
        }
        // Increasing weight, then lexicographic order of the sorted support.
        let key = |x: u32| (x.count_ones(), std::cmp::Reverse(x.reverse_bits()));
        if best.is_none_or(|b| key(e) < key(b)) {
            best = Some(e);
        }
    }
    let e = best.ok_or_else(|| Error::Infeasible("syndrome is not reachable by any error".into()))?;
    Ok((0..n).map(|q| e >> q & 1 == 1).collect())
}
