use serde::Serialize;

use super::{CodeFamily, Distance, StabilizerCode};
use crate::error::{Error, Result};
use crate::f2la::BitMatrix;

/// A plaquette of the rotated surface code anchored at `(row, col)`, covering
/// data qubits at its NW, NE, SW, SE corners (absent corners lie off the patch).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub row: i32,
    pub col: i32,
    pub corners: [Option<usize>; 4],
}

impl Face {
    fn new(row: i32, col: i32, d: i32) -> Self {
        let at = |r: i32, c: i32| {
            (r >= 0 && r < d && c >= 0 && c < d).then(|| (r * d + c) as usize)
        };
        Face {
            row,
            col,
            corners: [
                at(row, col),
                at(row, col + 1),
                at(row + 1, col),
                at(row + 1, col + 1),
            ],
        }
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.corners.iter().flatten().copied().collect();
        s.sort_unstable();
        s
    }
}

/// Rotated surface code of odd distance `d ≥ 3` on a `d × d` patch: data
/// qubit `(r, c)` has index `r·d + c`; bulk plaquettes alternate X/Z in a
/// checkerboard, weight-2 X checks sit on the top and bottom edges and
/// weight-2 Z checks on the left and right edges.
pub fn build_rotated_surface_code(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::validation(format!(
            "rotated surface code distance must be odd and at least 3 (got {d})"
        )));
    }
    let di = d as i32;
    let mut x_faces = Vec::new();
    let mut z_faces = Vec::new();
    for r in -1..di {
        for c in -1..di {
            let bulk = r >= 0 && c >= 0 && r < di - 1 && c < di - 1;
            let is_x = (r + c).rem_euclid(2) == 0;
            let horizontal_edge = (r == -1 || r == di - 1) && c >= 0 && c < di - 1;
            let vertical_edge = (c == -1 || c == di - 1) && r >= 0 && r < di - 1;
            if bulk || (horizontal_edge && is_x) {
                if is_x {
                    x_faces.push(Face::new(r, c, di));
                } else {
                    z_faces.push(Face::new(r, c, di));
                }
            } else if vertical_edge && !is_x {
                z_faces.push(Face::new(r, c, di));
            }
        }
    }
    let n = d * d;
    let sup = |faces: &[Face]| faces.iter().map(Face::support).collect::<Vec<_>>();
    let h_x = BitMatrix::from_supports(n, &sup(&x_faces))?;
    let h_z = BitMatrix::from_supports(n, &sup(&z_faces))?;
    let mut code = StabilizerCode::from_checks(format!("surface{d}"), h_x, h_z)?;
    code.distance = Some(Distance { value: d, exact: true });
    code.family = CodeFamily::RotatedSurface {
        distance: d,
        x_faces,
        z_faces,
    };
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::distance::code_distance_exact;

    #[test]
    fn distance_three() {
        let code = build_rotated_surface_code(3).unwrap();
        assert_eq!((code.n, code.k), (9, 1));
        assert!(code.is_css_commuting());
        assert_eq!(code.h_x.rows() + code.h_z.rows(), 8);
        assert_eq!(code_distance_exact(&code).unwrap(), 3);
    }

    #[test]
    fn distance_five() {
        let code = build_rotated_surface_code(5).unwrap();
        assert_eq!((code.n, code.k), (25, 1));
        assert_eq!(code.h_x.rows(), 12);
        assert_eq!(code.h_z.rows(), 12);
        assert_eq!(code_distance_exact(&code).unwrap(), 5);
        let weights: Vec<usize> = (0..code.h_x.rows()).map(|r| code.h_x.row_weight(r)).collect();
        assert_eq!(weights.iter().filter(|&&w| w == 2).count(), 4);
        assert!(weights.iter().all(|&w| w == 2 || w == 4));
    }

    #[test]
    fn rejects_bad_distance() {
        for d in [0, 1, 2, 4] {
            assert!(matches!(build_rotated_surface_code(d), Err(Error::Validation(_))));
        }
    }
}
