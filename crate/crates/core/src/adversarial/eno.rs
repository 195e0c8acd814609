//! The product-label law: independent labels with the random-polytope marginals.

use rand::Rng;

use crate::gauss::norm;
use crate::rng;

/// Label `i` is 1 with probability `rho(|x_i|)`, independently.
pub fn sample_eno_star(points: &[Vec<f64>], rho_fn: impl Fn(f64) -> f64, seed: u64) -> Vec<bool> {
    let mut s = rng::stream(seed, 0);
    points
        .iter()
        .map(|x| s.random::<f64>() < rho_fn(norm(x)))
        .collect()
}
