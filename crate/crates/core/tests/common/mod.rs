#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Hull membership by brute force over affinely independent subsets of at
/// most `n + 1` generators. Carathéodory's theorem says one of them contains
/// the point whenever the whole hull does.
pub fn caratheodory_member(point: &[f64], generators: &[Vec<f64>], tol: f64) -> bool {
    let n = point.len();
    let m = generators.len();
    assert!(m <= 16, "brute force is exponential in the generator count");
    let mut b = DVector::from_element(n + 1, 1.0);
    b.rows_mut(0, n).copy_from_slice(point);
    for mask in 1u32..(1 << m) {
        let k = mask.count_ones() as usize;
        if k > n + 1 {
            continue;
        }
        let chosen: Vec<&Vec<f64>> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &generators[i]).collect();
        let a = DMatrix::from_fn(n + 1, k, |r, c| if r < n { chosen[c][r] } else { 1.0 });
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 1e-10 * smax.max(1.0) {
            continue;
        }
        let Ok(lambda) = svd.solve(&b, 1e-14) else {
            continue;
        };
        let resid = (&a * &lambda - &b).amax();
        if resid <= tol && lambda.iter().all(|l| *l >= -tol) {
            return true;
        }
    }
    false
}

/// A small deterministic generator for test instances (splitmix64).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, k: usize) -> usize {
        (self.next_u64() % k as u64) as usize
    }

    pub fn point(&mut self, n: usize, half_width: f64) -> Vec<f64> {
        (0..n).map(|_| (2.0 * self.uniform() - 1.0) * half_width).collect()
    }
}

/// A hull-membership instance: random generators and a query that is either
/// a free point, a convex combination, a generator, or an edge midpoint.
pub fn hull_instance(rng: &mut Lcg) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = 1 + rng.below(3);
    let m = 1 + rng.below(8);
    let gens: Vec<Vec<f64>> = (0..m).map(|_| rng.point(n, 2.0)).collect();
    let query = match rng.below(4) {
        0 => rng.point(n, 2.5),
        1 => {
            let w: Vec<f64> = (0..m).map(|_| rng.uniform()).collect();
            let s: f64 = w.iter().sum();
            (0..n).map(|j| gens.iter().zip(&w).map(|(g, wi)| g[j] * wi / s).sum()).collect()
        }
        2 => gens[rng.below(m)].clone(),
        _ => {
            let (a, b) = (&gens[rng.below(m)], &gens[rng.below(m)]);
            a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
        }
    };
    (query, gens)
}
