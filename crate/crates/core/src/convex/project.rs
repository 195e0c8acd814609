//! Euclidean projection onto `{x : A x <= b}`.
//!
//! The projection is a least-distance program, solved through the classical
//! reduction to non-negative least squares (Lawson and Hanson, ch. 23).

use nalgebra::{DMatrix, DVector};

const NNLS_TOL: f64 = 1e-12;

/// Lawson–Hanson active-set NNLS: `argmin ||E w - f||` subject to `w >= 0`.
pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> DVector<f64> {
    let cols = e.ncols();
    let mut w = DVector::zeros(cols);
    let mut passive = vec![false; cols];
    let max_outer = 3 * cols + 30;

    for _ in 0..max_outer {
        let grad = e.transpose() * (f - e * &w);
        let candidate = (0..cols)
            .filter(|&j| !passive[j] && grad[j] > NNLS_TOL)
            .max_by(|&a, &b| grad[a].total_cmp(&grad[b]));
        let Some(j) = candidate else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..cols).filter(|&k| passive[k]).collect();
            let z_p = solve_passive(e, f, &idx);
            if idx.iter().zip(z_p.iter()).all(|(_, z)| *z > NNLS_TOL) {
                for (k, &c) in idx.iter().enumerate() {
                    w[c] = z_p[k];
                }
                break;
            }
            // step back toward the feasible region
            let mut step = 1.0f64;
            for (k, &c) in idx.iter().enumerate() {
                if z_p[k] <= NNLS_TOL {
                    let denom = w[c] - z_p[k];
                    if denom > 0.0 {
                        step = step.min(w[c] / denom);
                    }
                }
            }
            for (k, &c) in idx.iter().enumerate() {
                w[c] += step * (z_p[k] - w[c]);
            }
            let mut changed = false;
            for &c in &idx {
                if w[c] <= NNLS_TOL {
                    w[c] = 0.0;
                    passive[c] = false;
                    changed = true;
                }
            }
            if !changed || !passive.iter().any(|p| *p) {
                break;
            }
        }
    }
    w
}

fn solve_passive(e: &DMatrix<f64>, f: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    let sub = e.select_columns(idx);
    let svd = sub.svd(true, true);
    svd.solve(f, 1e-13).unwrap_or_else(|_| DVector::zeros(idx.len()))
}

/// Nearest point to `x` in `{y : normals[i] . y <= offsets[i]}`, or `None`
/// when the constraints are infeasible.
pub fn project_onto_polytope(x: &[f64], normals: &[Vec<f64>], offsets: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let m = normals.len();
    if m == 0 {
        return Some(x.to_vec());
    }
    // with u = y - x the program is min |u| s.t. (-A) u >= A x - b
    let mut e = DMatrix::zeros(n + 1, m);
    for (i, (a, b)) in normals.iter().zip(offsets).enumerate() {
        let ax: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        for j in 0..n {
            e[(j, i)] = -a[j];
        }
        e[(n, i)] = ax - b;
    }
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let w = nnls(&e, &f);
    let r = &e * w - f;
    if r.norm() < 1e-12 || r[n].abs() < 1e-300 {
        return None;
    }
    Some((0..n).map(|j| x[j] - r[j] / r[n]).collect())
}
