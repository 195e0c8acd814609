//! Monte Carlo estimators under the standard Gaussian measure.

use serde::{Deserialize, Serialize};

use super::target::TargetSet;
use crate::error::{Error, Result};
use crate::gauss::fill_gaussian;
use crate::rng;

/// A binomial frequency with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_count(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Counts Gaussian draws for which `pred` holds, in parallel chunks.
pub fn gaussian_frequency<F>(n: usize, samples: u64, seed: u64, pred: F) -> Estimate
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let hits = rng::par_count(samples as usize, seed, |s, len| {
        let mut x = vec![0.0; n];
        let mut c = 0;
        for _ in 0..len {
            fill_gaussian(s, &mut x);
            if pred(&x) {
                c += 1;
            }
        }
        c
    });
    Estimate::from_count(hits, samples)
}

/// Gaussian volume of `A xor B`.
pub fn estimate_distance(a: &TargetSet, b: &TargetSet, samples: u64, seed: u64) -> Result<Estimate> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if samples == 0 {
        return Err(Error::param("samples must be at least 1"));
    }
    Ok(gaussian_frequency(a.dim(), samples, seed, |x| {
        a.contains(x) != b.contains(x)
    }))
}

/// Gaussian volume of a set.
pub fn estimate_volume(a: &TargetSet, samples: u64, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::param("samples must be at least 1"));
    }
    Ok(gaussian_frequency(a.dim(), samples, seed, |x| a.contains(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples_used: u64,
    pub alpha: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl BoundaryVolumeEstimate {
    /// `20 n^{5/8} K sqrt(alpha)`.
    pub fn bound(&self, n: usize) -> f64 {
        boundary_volume_bound(n, self.k, self.alpha)
    }

    /// The estimate minus four standard errors stays under the bound.
    pub fn within_bound(&self, n: usize) -> bool {
        self.estimate - 4.0 * self.std_error <= self.bound(n)
    }
}

pub fn boundary_volume_bound(n: usize, k: f64, alpha: f64) -> f64 {
    20.0 * (n as f64).powf(0.625) * k * alpha.sqrt()
}

/// Gaussian volume of `boundary(C) + Ball(alpha)`.
pub fn estimate_thickened_boundary_volume(
    c: &TargetSet,
    alpha: f64,
    k: f64,
    samples: u64,
    seed: u64,
) -> Result<BoundaryVolumeEstimate> {
    let n = c.dim();
    if !c.is_convex() {
        return Err(Error::param("thickened-boundary estimate needs a convex target"));
    }
    let upper = (n as f64).powf(-0.75);
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::param(format!(
            "alpha must lie in (0, n^-3/4) = (0, {upper}), got {alpha}"
        )));
    }
    if samples == 0 {
        return Err(Error::param("samples must be at least 1"));
    }
    let origin = vec![0.0; n];
    if c.near_boundary(&origin, alpha).is_none() {
        return Err(Error::param("target kind has no boundary-distance test"));
    }
    let e = gaussian_frequency(n, samples, seed, |x| c.near_boundary(x, alpha).unwrap_or(false));
    Ok(BoundaryVolumeEstimate {
        estimate: e.estimate,
        std_error: e.std_error,
        samples_used: samples,
        alpha,
        k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallTheoremCheck {
    /// Estimate of `Vol(C_h \ C) / h`.
    pub ratio: f64,
    /// Standard error of the ratio.
    pub std_error: f64,
    pub bound: f64,
    pub h: f64,
    pub samples: u64,
    pub holds: bool,
}

/// Checks `Vol(C_h \ C) / h <= 4 n^{1/4}`, where `C_h` is the set of points
/// within `h` of `C`.
pub fn check_ball_theorem(c: &TargetSet, h: f64, samples: u64, seed: u64) -> Result<BallTheoremCheck> {
    let n = c.dim();
    if !(h > 0.0) {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    if samples == 0 {
        return Err(Error::param("samples must be at least 1"));
    }
    if c.distance_to_set(&vec![0.0; n]).is_none() {
        return Err(Error::param("target kind has no distance-to-set test"));
    }
    let e = gaussian_frequency(n, samples, seed, |x| {
        !c.contains(x) && c.within_distance(x, h).unwrap_or(false)
    });
    let ratio = e.estimate / h;
    let std_error = e.std_error / h;
    let bound = 4.0 * (n as f64).powf(0.25);
    Ok(BallTheoremCheck {
        ratio,
        std_error,
        bound,
        h,
        samples,
        holds: ratio - 4.0 * std_error <= bound,
    })
}

/// Checks that `points` evenly spaced interior points of the segment `[x, y]`
/// are members. Meaningful only when both endpoints are members.
pub fn segment_witness(c: &TargetSet, x: &[f64], y: &[f64], points: usize) -> bool {
    let mut z = vec![0.0; x.len()];
    (1..=points).all(|k| {
        let t = k as f64 / (points + 1) as f64;
        for j in 0..x.len() {
            z[j] = (1.0 - t) * x[j] + t * y[j];
        }
        c.contains(&z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::TargetSpec;
    use crate::gauss::{normal_cdf, radial_band_mass};

    fn halfspace(n: usize, sign: f64) -> TargetSet {
        let mut a = vec![0.0; n];
        a[0] = sign;
        TargetSpec::Halfspaces {
            normals: vec![a],
            offsets: vec![0.0],
        }
        .build()
        .unwrap()
    }

    #[test]
    fn distance_identities() {
        let full = TargetSpec::Full { n: 3 }.build().unwrap();
        let empty = TargetSpec::Empty { n: 3 }.build().unwrap();
        assert_eq!(estimate_distance(&full, &full, 1000, 1).unwrap().estimate, 0.0);
        assert_eq!(estimate_distance(&full, &empty, 1000, 1).unwrap().estimate, 1.0);
        let e = estimate_distance(&halfspace(3, 1.0), &halfspace(3, -1.0), 100_000, 2).unwrap();
        assert!(1.0 - e.estimate <= 4.0 * e.std_error.max(1e-12));
    }

    #[test]
    fn distance_is_symmetric() {
        let a = TargetSpec::Ball {
            center: vec![0.3, 0.0],
            radius: 1.0,
        }
        .build()
        .unwrap();
        let b = halfspace(2, 1.0);
        let ab = estimate_distance(&a, &b, 50_000, 8).unwrap();
        let ba = estimate_distance(&b, &a, 50_000, 8).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn ball_boundary_matches_radial_mass() {
        let n = 4;
        let rho = 2.0;
        let alpha = 0.1;
        let ball = TargetSpec::Ball {
            center: vec![0.0; n],
            radius: rho,
        }
        .build()
        .unwrap();
        let est = estimate_thickened_boundary_volume(&ball, alpha, rho, 400_000, 5).unwrap();
        let exact = radial_band_mass(n, rho - alpha, rho + alpha);
        assert!((est.estimate - exact).abs() <= 4.0 * est.std_error);
        assert!(est.within_bound(n));
    }

    #[test]
    fn full_space_has_no_boundary() {
        let full = TargetSpec::Full { n: 2 }.build().unwrap();
        let est = estimate_thickened_boundary_volume(&full, 0.1, 2.0, 10_000, 1).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn alpha_range_is_enforced() {
        let full = TargetSpec::Full { n: 16 }.build().unwrap();
        assert!(estimate_thickened_boundary_volume(&full, 0.2, 2.0, 10, 1).is_err());
        assert!(estimate_thickened_boundary_volume(&full, 0.0, 2.0, 10, 1).is_err());
    }

    #[test]
    fn ball_theorem_on_halfspace() {
        let c = halfspace(2, 1.0);
        let chk = check_ball_theorem(&c, 0.01, 1_000_000, 3).unwrap();
        let exact = (normal_cdf(0.01) - 0.5) / 0.01;
        assert!((chk.ratio - exact).abs() <= 4.0 * chk.std_error);
        assert!(chk.holds);
        let full = TargetSpec::Full { n: 2 }.build().unwrap();
        let chk = check_ball_theorem(&full, 0.01, 1000, 3).unwrap();
        assert_eq!(chk.ratio, 0.0);
        assert!(chk.holds);
    }

    #[test]
    fn segment_witness_on_ball_and_stripe() {
        let ball = TargetSpec::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        }
        .build()
        .unwrap();
        assert!(segment_witness(&ball, &[-0.9, 0.0], &[0.0, 0.9], 100));
        let stripe = TargetSpec::Stripe { n: 2, thresholds: 5 }.build().unwrap();
        assert!(!segment_witness(&stripe, &[-3.0, 0.0], &[3.0, 0.0], 100));
    }
}
