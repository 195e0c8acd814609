//! How often `M` Gaussian points are all vertices of their convex hull.

use serde::{Deserialize, Serialize};

use crate::convex::hull::{solve_hull, LP_TOL};
use crate::error::{Error, Result};
use crate::gauss::{gaussian_point, norm, normal_sf, radial_band_mass};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideInequality {
    /// Monte Carlo frequency over all drawn points.
    pub frequency: f64,
    /// Exact Gaussian probability.
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterReport {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    /// Fraction of trials in which no point lies in the hull of the others.
    pub frequency: f64,
    pub std_error: f64,
    /// `Pr[|x| <= sqrt(n)/10]` against `M^{-2} / 2`.
    pub small_norm: SideInequality,
    /// `Pr[x_1 >= sqrt(n)/10]` against `M^{-3} / 2`.
    pub far_projection: SideInequality,
}

pub fn shattering_experiment(n: usize, m: usize, trials: u64, seed: u64) -> Result<ShatterReport> {
    if n == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if m < 2 {
        return Err(Error::param("need at least two points"));
    }
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let cut = (n as f64).sqrt() / 10.0;
    let parts = rng::par_chunks(trials as usize, seed, |s, len| {
        let (mut shattered, mut small, mut far) = (0u64, 0u64, 0u64);
        for _ in 0..len {
            let pts: Vec<Vec<f64>> = (0..m).map(|_| gaussian_point(s, n)).collect();
            small += pts.iter().filter(|x| norm(x) <= cut).count() as u64;
            far += pts.iter().filter(|x| x[0] >= cut).count() as u64;
            let all_extreme = (0..m).all(|i| {
                let others: Vec<Vec<f64>> = pts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, x)| x.clone())
                    .collect();
                !solve_hull(&pts[i], &others, LP_TOL).expect("dimensions agree").member
            });
            shattered += all_extreme as u64;
        }
        (shattered, small, far)
    });
    let (mut shattered, mut small, mut far) = (0u64, 0u64, 0u64);
    for (a, b, c) in parts {
        shattered += a;
        small += b;
        far += c;
    }
    let p = shattered as f64 / trials as f64;
    let draws = (trials * m as u64) as f64;
    let mf = m as f64;
    let small_exact = radial_band_mass(n, 0.0, cut);
    let far_exact = normal_sf(cut);
    Ok(ShatterReport {
        n,
        m,
        trials,
        frequency: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        small_norm: SideInequality {
            frequency: small as f64 / draws,
            exact: small_exact,
            bound: 0.5 * mf.powi(-2),
            holds: small_exact < 0.5 * mf.powi(-2),
        },
        far_projection: SideInequality {
            frequency: far as f64 / draws,
            exact: far_exact,
            bound: 0.5 * mf.powi(-3),
            holds: far_exact < 0.5 * mf.powi(-3),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_points_on_a_line_never_shatter() {
        assert_eq!(shattering_experiment(1, 3, 500, 1).unwrap().frequency, 0.0);
    }

    #[test]
    fn three_points_in_the_plane_always_shatter() {
        assert_eq!(shattering_experiment(2, 3, 500, 1).unwrap().frequency, 1.0);
    }

    #[test]
    fn side_metrics_match_exact_values() {
        let rep = shattering_experiment(4, 10, 20_000, 3).unwrap();
        let draws = 200_000.0;
        for side in [&rep.small_norm, &rep.far_projection] {
            let sigma = (side.exact * (1.0 - side.exact) / draws).sqrt();
            assert!((side.frequency - side.exact).abs() <= 4.0 * sigma);
        }
    }
}
