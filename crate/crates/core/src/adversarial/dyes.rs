//! Random polytopes: `N` halfspaces tangent to `Ball(r)` at uniform directions.

use serde::{Deserialize, Serialize};

use crate::convex::target::Polytope;
use crate::error::{Error, Result};
use crate::gauss::{dot, sphere_point};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomPolytope {
    pub r: f64,
    /// Points `y_i` on the sphere of radius `r`.
    pub normals: Vec<Vec<f64>>,
    pub seed: u64,
}

impl RandomPolytope {
    pub fn dim(&self) -> usize {
        self.normals.first().map_or(0, Vec::len)
    }

    /// `x . y_i <= r^2` for every `i`.
    pub fn contains(&self, x: &[f64]) -> bool {
        let r2 = self.r * self.r;
        self.normals.iter().all(|y| dot(x, y) <= r2)
    }

    /// Row of the halfspace matrix for `x`: bit `j` is `x . y_j <= r^2`.
    pub fn halfspace_bits(&self, x: &[f64]) -> Vec<bool> {
        let r2 = self.r * self.r;
        self.normals.iter().map(|y| dot(x, y) <= r2).collect()
    }

    pub fn to_polytope(&self) -> Polytope {
        let r2 = self.r * self.r;
        Polytope::new(self.normals.clone(), vec![r2; self.normals.len()])
            .expect("normals lie on a sphere of positive radius")
    }
}

/// Draws `halfspaces` directions uniformly from the sphere of radius `r`.
pub fn sample_dyes(n: usize, halfspaces: usize, r: f64, seed: u64) -> Result<RandomPolytope> {
    if n == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if halfspaces == 0 {
        return Err(Error::param("need at least one halfspace"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param(format!("radius must be positive, got {r}")));
    }
    let mut s = rng::stream(seed, 0);
    let normals = (0..halfspaces).map(|_| sphere_point(&mut s, n, r)).collect();
    Ok(RandomPolytope { r, normals, seed })
}

/// Empirical `Pr[z in S]` for `z = (radius, 0, ..., 0)` over fresh polytopes,
/// next to the exact `rho(radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalCheck {
    pub radius: f64,
    pub rho: f64,
    pub frequency: f64,
    /// Binomial standard deviation of the frequency under `rho`.
    pub sigma: f64,
    pub polytopes: u64,
}

impl MarginalCheck {
    pub fn within(&self, k: f64) -> bool {
        (self.frequency - self.rho).abs() <= k * self.sigma.max(f64::MIN_POSITIVE)
    }
}

pub fn marginal_identity(
    params: &crate::gauss::LowerBoundParams,
    radii: &[f64],
    polytopes: u64,
    seed: u64,
) -> Vec<MarginalCheck> {
    let n = params.n;
    let rho = params.rho();
    let r2 = params.r * params.r;
    radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| {
            let hits = rng::par_count(polytopes as usize, rng::split_seed(seed, k as u64), |s, len| {
                let mut c = 0;
                for _ in 0..len {
                    // z . y_j = radius * y_j[0], so only first coordinates matter
                    let inside = (0..params.halfspaces)
                        .all(|_| radius * sphere_point(s, n, params.r)[0] <= r2);
                    c += inside as u64;
                }
                c
            });
            let p = rho.eval(radius);
            MarginalCheck {
                radius,
                rho: p,
                frequency: hits as f64 / polytopes as f64,
                sigma: (p * (1.0 - p) / polytopes as f64).sqrt(),
                polytopes,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::norm;

    #[test]
    fn normals_have_radius_r() {
        let p = sample_dyes(5, 40, 1.7, 9).unwrap();
        for y in &p.normals {
            assert!((norm(y) - 1.7).abs() < 1e-9);
        }
        assert!(p.contains(&[0.0; 5]));
    }

    #[test]
    fn inner_ball_is_inside() {
        let p = sample_dyes(3, 100, 2.0, 1).unwrap();
        let mut s = rng::stream(5, 0);
        for _ in 0..200 {
            let x = sphere_point(&mut s, 3, 2.0 * (1.0 - 1e-12));
            assert!(p.contains(&x));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_dyes(0, 2, 1.0, 0).is_err());
        assert!(sample_dyes(2, 0, 1.0, 0).is_err());
        assert!(sample_dyes(2, 2, -1.0, 0).is_err());
    }
}
