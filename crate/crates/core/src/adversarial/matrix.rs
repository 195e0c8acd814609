//! The `q x N` halfspace-membership matrix of query points against a polytope.

use serde::{Deserialize, Serialize};

use super::dyes::RandomPolytope;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfspaceMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major; entry `(i, j)` is 1 iff `z_i` satisfies halfspace `j`.
    pub entries: Vec<bool>,
}

impl HalfspaceMatrix {
    pub fn from_polytope(points: &[Vec<f64>], polytope: &RandomPolytope) -> Self {
        let entries = points
            .iter()
            .flat_map(|z| polytope.halfspace_bits(z))
            .collect();
        Self {
            rows: points.len(),
            cols: polytope.normals.len(),
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.cols + j]
    }

    pub fn zeros(&self) -> usize {
        self.entries.iter().filter(|e| !**e).count()
    }

    /// Row `i` is all ones, i.e. `z_i` is in the polytope.
    pub fn row_label(&self, i: usize) -> bool {
        (0..self.cols).all(|j| self.get(i, j))
    }
}

/// At most `sqrt(N)` zeros overall and at most one zero per column.
pub fn nice_matrix_check(m: &HalfspaceMatrix) -> bool {
    if (m.zeros() as f64) > (m.cols as f64).sqrt() {
        return false;
    }
    (0..m.cols).all(|j| (0..m.rows).filter(|&i| !m.get(i, j)).count() <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: usize, cols: usize, zeros: &[(usize, usize)]) -> HalfspaceMatrix {
        let mut entries = vec![true; rows * cols];
        for &(i, j) in zeros {
            entries[i * cols + j] = false;
        }
        HalfspaceMatrix { rows, cols, entries }
    }

    #[test]
    fn all_ones_is_nice() {
        assert!(nice_matrix_check(&matrix(3, 16, &[])));
    }

    #[test]
    fn two_zeros_in_a_column_is_bad() {
        assert!(!nice_matrix_check(&matrix(3, 16, &[(0, 2), (1, 2)])));
    }

    #[test]
    fn too_many_zeros_is_bad() {
        // sqrt(16) = 4, so five zeros in distinct columns fail
        let z: Vec<(usize, usize)> = (0..5).map(|j| (j % 3, j)).collect();
        assert!(!nice_matrix_check(&matrix(3, 16, &z)));
        assert!(nice_matrix_check(&matrix(3, 16, &z[..4])));
    }

    #[test]
    fn rows_match_polytope_membership() {
        let p = super::super::dyes::sample_dyes(3, 10, 1.0, 5).unwrap();
        let pts = vec![vec![0.0, 0.0, 0.0], vec![2.0, 1.0, -1.0], vec![-1.5, 0.3, 0.2]];
        let m = HalfspaceMatrix::from_polytope(&pts, &p);
        for (i, z) in pts.iter().enumerate() {
            assert_eq!(m.row_label(i), p.contains(z));
        }
    }
}
