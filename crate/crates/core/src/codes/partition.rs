use serde::Serialize;

use super::StabilizerCode;
use crate::f2la::BitMatrix;

/// Connected components of the Z-check/left-qubit and X-check/right-qubit
/// bipartite graphs. The toric layout exists when each side splits into
/// `l` components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    /// Left data qubits (0-based) grouped by Z-check component.
    pub left_components: Vec<Vec<usize>>,
    /// Right data qubits (0-based, full index) grouped by X-check component.
    pub right_components: Vec<Vec<usize>>,
    pub expected: usize,
    pub layout_exists: bool,
}

pub fn check_left_right_partition(code: &StabilizerCode) -> PartitionReport {
    let half = code.left_count.unwrap_or(code.n / 2);
    let expected = code.spec().map(|s| s.l).unwrap_or(0);
    let left_components = components(&code.h_z, 0, half);
    let right_components = components(&code.h_x, half, code.n);
    let layout_exists = expected > 0
        && left_components.len() == expected
        && right_components.len() == expected;
    PartitionReport {
        left_components,
        right_components,
        expected,
        layout_exists,
    }
}

/// Components of the graph joining each check to its qubits in `lo..hi`,
/// reported as qubit sets; qubits untouched by any check are singletons.
fn components(h: &BitMatrix, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let width = hi - lo;
    let mut parent: Vec<usize> = (0..width).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for r in 0..h.rows() {
        let qs: Vec<usize> = h
            .row_support(r)
            .into_iter()
            .filter(|&q| q >= lo && q < hi)
            .map(|q| q - lo)
            .collect();
        for w in qs.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for q in 0..width {
        let root = find(&mut parent, q);
        groups.entry(root).or_default().push(q + lo);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_code, named_code, Axis, Monomial, TBCodeSpec};

    #[test]
    fn twelve_splits_in_two() {
        let r = check_left_right_partition(&named_code("tb12").unwrap());
        assert!(r.layout_exists);
        assert_eq!(r.left_components, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(r.right_components.len(), 2);
    }

    #[test]
    fn twenty_four_splits_in_four() {
        let r = check_left_right_partition(&named_code("tb24").unwrap());
        assert_eq!(r.left_components.len(), 4);
        assert_eq!(r.right_components.len(), 4);
        assert!(r.layout_exists);
    }

    #[test]
    fn adversarial_spec_does_not_error() {
        let t = |a, p| Monomial::new(a, p);
        let spec = TBCodeSpec::new(2, 3, vec![t(Axis::X, 1), t(Axis::Y, 1)], vec![t(Axis::X, 1), t(Axis::Y, 1)])
            .unwrap();
        let r = check_left_right_partition(&build_code(&spec).unwrap());
        // x + y links every qubit of the 2×3 torus: one component per side.
        assert_eq!(r.left_components.len(), 1);
        assert!(!r.layout_exists);
    }
}
