//! Numerical checks of the geometric lemmas behind the thickened-boundary bound.
//!
//! * `no_ball`: a convex set with no ball of radius `rho` has
//!   `Vol(C + Ball(alpha)) <= 2 (n rho + alpha)`.
//! * `shrink`: if `Ball(rho) <= C` then `(1 - alpha/rho) C` stays at distance
//!   `>= alpha` from the boundary of `C`.
//! * `thicken`: if `sup |c| <= K` then each point of `boundary(C) + Ball(alpha)`
//!   is within `2 K beta + alpha` of `(1 - beta) C`.

use serde::{Deserialize, Serialize};

use super::estimate::{
    boundary_volume_bound, estimate_thickened_boundary_volume, gaussian_frequency,
    BoundaryVolumeEstimate,
};
use super::target::{Polytope, TargetSpec};
use crate::adversarial::dyes::sample_dyes;
use crate::error::{Error, Result};
use crate::gauss::{dot, norm, sphere_point, LowerBoundParams};
use crate::rng;
use rand::Rng;

const DIST_TOL: f64 = 1e-9;

fn default_extent() -> f64 {
    3.0
}

/// Instance family for the `shrink` and `thicken` checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LemmaFamily {
    Ball {
        radius: f64,
    },
    /// A random polytope whose halfspaces are tangent to `Ball(r)`, clipped to
    /// `[-bound_box, bound_box]^n`.
    RandomPolytope {
        halfspaces: usize,
        r: f64,
        bound_box: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case", deny_unknown_fields)]
pub enum LemmaConfig {
    /// `C` is the box `|x_1| <= width/2`, `|x_j| <= half_extent` for `j > 1`.
    NoBall {
        n: usize,
        rho: f64,
        alpha: f64,
        width: f64,
        #[serde(default = "default_extent")]
        half_extent: f64,
        samples: u64,
        seed: u64,
    },
    Shrink {
        n: usize,
        rho: f64,
        alpha: f64,
        family: LemmaFamily,
        points: usize,
        seed: u64,
    },
    Thicken {
        n: usize,
        beta: f64,
        alpha: f64,
        family: LemmaFamily,
        points: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub passed: bool,
    /// Volume estimate (`no_ball`), smallest distance (`shrink`) or largest
    /// distance (`thicken`).
    pub statistic: f64,
    pub bound: f64,
    /// Signed slack in the direction of the inequality; non-negative on a pass.
    pub margin: f64,
    pub std_error: Option<f64>,
    pub samples: u64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

enum Body {
    Ball(f64),
    Poly(Polytope),
}

impl Body {
    fn build(n: usize, family: &LemmaFamily) -> Result<Self> {
        match family {
            LemmaFamily::Ball { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::param("ball radius must be positive"));
                }
                Ok(Body::Ball(*radius))
            }
            LemmaFamily::RandomPolytope {
                halfspaces,
                r,
                bound_box,
                seed,
            } => {
                if !(*bound_box >= *r) {
                    return Err(Error::param("bound_box must be at least r"));
                }
                let rp = sample_dyes(n, *halfspaces, *r, *seed)?;
                let base = rp.to_polytope();
                let mut normals = base.normals.clone();
                let mut offsets = base.offsets.clone();
                for j in 0..n {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; n];
                        e[j] = s;
                        normals.push(e);
                        offsets.push(*bound_box);
                    }
                }
                Ok(Body::Poly(Polytope::new(normals, offsets)?))
            }
        }
    }

    /// `sup |c|` over the body.
    fn norm_bound(&self, n: usize, family: &LemmaFamily) -> f64 {
        match (self, family) {
            (Body::Ball(r), _) => *r,
            (_, LemmaFamily::RandomPolytope { bound_box, .. }) => bound_box * (n as f64).sqrt(),
            _ => unreachable!(),
        }
    }

    /// Largest radius of a centred ball inside the body.
    fn inner_radius(&self) -> f64 {
        match self {
            Body::Ball(r) => *r,
            Body::Poly(p) => p
                .face_distances(&vec![0.0; p.normals[0].len()])
                .into_iter()
                .map(|d| -d)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Boundary point along direction `u` (unit), from the origin.
    fn boundary_along(&self, u: &[f64]) -> Vec<f64> {
        let t = match self {
            Body::Ball(r) => *r,
            Body::Poly(p) => p
                .normals
                .iter()
                .zip(&p.offsets)
                .filter_map(|(a, b)| {
                    let au = dot(a, u);
                    (au > 0.0).then(|| b / au)
                })
                .fold(f64::INFINITY, f64::min),
        };
        u.iter().map(|v| v * t).collect()
    }

    /// Distance from `x` to `factor * body`.
    fn distance_to_scaled(&self, x: &[f64], factor: f64) -> f64 {
        match self {
            Body::Ball(r) => (norm(x) - r * factor).max(0.0),
            Body::Poly(p) => p.scaled(factor).distance_to_set(x),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

pub fn check_appendix_lemmas(config: &LemmaConfig) -> Result<LemmaReport> {
    match config {
        LemmaConfig::NoBall {
            n,
            rho,
            alpha,
            width,
            half_extent,
            samples,
            seed,
        } => {
            check_unit("rho", *rho)?;
            check_unit("alpha", *alpha)?;
            check_unit("half_extent", *half_extent)?;
            if *n == 0 || *samples == 0 {
                return Err(Error::param("n and samples must be positive"));
            }
            if !(*width >= 0.0 && *width < 2.0 * rho) {
                return Err(Error::param("width must lie in [0, 2 rho) so no rho-ball fits"));
            }
            let mut half = vec![*half_extent; *n];
            half[0] = width / 2.0;
            let a2 = alpha * alpha;
            let e = gaussian_frequency(*n, *samples, *seed, |x| {
                let d2: f64 = x
                    .iter()
                    .zip(&half)
                    .map(|(v, h)| (v.abs() - h).max(0.0).powi(2))
                    .sum();
                d2 <= a2
            });
            let bound = 2.0 * (*n as f64 * rho + alpha);
            let lower = e.estimate - 4.0 * e.std_error;
            Ok(LemmaReport {
                lemma: "no_ball".into(),
                passed: lower <= bound,
                statistic: e.estimate,
                bound,
                margin: bound - lower,
                std_error: Some(e.std_error),
                samples: *samples,
                k: None,
            })
        }
        LemmaConfig::Shrink {
            n,
            rho,
            alpha,
            family,
            points,
            seed,
        } => {
            check_unit("rho", *rho)?;
            check_unit("alpha", *alpha)?;
            if !(rho > alpha) {
                return Err(Error::param("need rho > alpha"));
            }
            let body = Body::build(*n, family)?;
            if body.inner_radius() < rho * (1.0 - 1e-12) {
                return Err(Error::param("instance does not contain Ball(rho)"));
            }
            let factor = 1.0 - alpha / rho;
            let dists = boundary_sample(*n, *points, *seed, |_, u| {
                let z = body.boundary_along(u);
                body.distance_to_scaled(&z, factor)
            });
            let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(LemmaReport {
                lemma: "shrink".into(),
                passed: min >= alpha - DIST_TOL,
                statistic: min,
                bound: *alpha,
                margin: min - alpha,
                std_error: None,
                samples: *points as u64,
                k: None,
            })
        }
        LemmaConfig::Thicken {
            n,
            beta,
            alpha,
            family,
            points,
            seed,
        } => {
            check_unit("alpha", *alpha)?;
            if !(*beta > 0.0 && *beta < 1.0) {
                return Err(Error::param("beta must lie in (0, 1)"));
            }
            let body = Body::build(*n, family)?;
            let k = body.norm_bound(*n, family);
            if !(k > 1.0) {
                return Err(Error::param("norm bound K must exceed 1"));
            }
            let bound = 2.0 * k * beta + alpha;
            let nn = *n;
            let dists = boundary_sample(*n, *points, *seed, |s, u| {
                let c = body.boundary_along(u);
                let radius = alpha * s.random::<f64>().powf(1.0 / nn as f64);
                let y = sphere_point(s, nn, radius);
                let v: Vec<f64> = c.iter().zip(&y).map(|(a, b)| a + b).collect();
                body.distance_to_scaled(&v, 1.0 - beta)
            });
            let max = dists.iter().cloned().fold(0.0, f64::max);
            Ok(LemmaReport {
                lemma: "thicken".into(),
                passed: max <= bound + DIST_TOL,
                statistic: max,
                bound,
                margin: bound - max,
                std_error: None,
                samples: *points as u64,
                k: Some(k),
            })
        }
    }
}

fn boundary_sample<F>(n: usize, points: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut rng::Stream, &[f64]) -> f64 + Sync,
{
    rng::par_chunks(points, seed, |s, len| {
        (0..len)
            .map(|_| {
                let u = sphere_point(s, n, 1.0);
                f(s, &u)
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

/// Thickened-boundary volumes of random polytopes, each clipped to
/// `[-K/sqrt(n), K/sqrt(n)]^n` so that `sup |c| <= K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVolumeReport {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub bound: f64,
    pub estimates: Vec<BoundaryVolumeEstimate>,
    pub max_estimate: f64,
    pub all_within: bool,
}

pub fn check_boundary_volume_on_polytopes(
    n: usize,
    k: f64,
    alpha: f64,
    polytopes: usize,
    samples: u64,
    seed: u64,
) -> Result<BoundaryVolumeReport> {
    check_unit("K", k)?;
    let lb = LowerBoundParams::with_overrides(n, None, Some(1), None)?;
    let box_half = k / (n as f64).sqrt();
    let mut estimates = Vec::with_capacity(polytopes);
    for i in 0..polytopes {
        let spec = TargetSpec::RandomPolytope {
            n,
            halfspaces: Some(lb.halfspaces),
            r: Some(lb.r),
            seed: rng::split_seed(seed, 2 * i as u64),
            bound_box: Some(box_half),
        };
        let c = spec.build()?;
        estimates.push(estimate_thickened_boundary_volume(
            &c,
            alpha,
            k,
            samples,
            rng::split_seed(seed, 2 * i as u64 + 1),
        )?);
    }
    let bound = boundary_volume_bound(n, k, alpha);
    let max_estimate = estimates.iter().map(|e| e.estimate).fold(0.0, f64::max);
    let all_within = estimates.iter().all(|e| e.within_bound(n));
    Ok(BoundaryVolumeReport {
        n,
        k,
        alpha,
        bound,
        estimates,
        max_estimate,
        all_within,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrink_ball_equality_case() {
        let rep = check_appendix_lemmas(&LemmaConfig::Shrink {
            n: 3,
            rho: 1.0,
            alpha: 0.2,
            family: LemmaFamily::Ball { radius: 1.0 },
            points: 100,
            seed: 1,
        })
        .unwrap();
        assert!(rep.passed);
        assert!((rep.statistic - 0.2).abs() < 1e-12);
    }

    #[test]
    fn shrink_polytope() {
        let rep = check_appendix_lemmas(&LemmaConfig::Shrink {
            n: 3,
            rho: 1.0,
            alpha: 0.3,
            family: LemmaFamily::RandomPolytope {
                halfspaces: 12,
                r: 1.0,
                bound_box: 2.0,
                seed: 4,
            },
            points: 300,
            seed: 2,
        })
        .unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.statistic >= 0.3 - 1e-9);
    }

    #[test]
    fn segment_limit_of_no_ball() {
        let rep = check_appendix_lemmas(&LemmaConfig::NoBall {
            n: 2,
            rho: 0.05,
            alpha: 0.05,
            width: 0.0,
            half_extent: 3.0,
            samples: 200_000,
            seed: 3,
        })
        .unwrap();
        assert!(rep.passed);
        assert!(rep.statistic < rep.bound);
    }

    #[test]
    fn thicken_ball_and_polytope() {
        for family in [
            LemmaFamily::Ball { radius: 2.0 },
            LemmaFamily::RandomPolytope {
                halfspaces: 6,
                r: 0.8,
                bound_box: 1.5,
                seed: 9,
            },
        ] {
            let rep = check_appendix_lemmas(&LemmaConfig::Thicken {
                n: 2,
                beta: 0.1,
                alpha: 0.01,
                family,
                points: 400,
                seed: 7,
            })
            .unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let bad = LemmaConfig::NoBall {
            n: 2,
            rho: 0.1,
            alpha: 0.1,
            width: 0.3,
            half_extent: 3.0,
            samples: 10,
            seed: 0,
        };
        assert!(check_appendix_lemmas(&bad).is_err());
        let bad = LemmaConfig::Shrink {
            n: 2,
            rho: 2.0,
            alpha: 0.1,
            family: LemmaFamily::Ball { radius: 1.0 },
            points: 10,
            seed: 0,
        };
        assert!(check_appendix_lemmas(&bad).is_err());
    }
}
