//! Empirical comparison of the joint label law under random polytopes with
//! the independent product law sharing its marginals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dyes::RandomPolytope;
use super::matrix::{nice_matrix_check, HalfspaceMatrix};
use super::typicality::{typicality_check, TypicalityConfig, TypicalityReport};
use crate::error::{Error, Result};
use crate::gauss::{gaussian_point, norm, sphere_point, CapTable, LowerBoundParams};
use crate::rng;

pub const MAX_Q: usize = 12;
pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistinguishConfig {
    pub n: usize,
    pub q: usize,
    /// Halfspace count `N`.
    pub halfspaces: usize,
    /// Sphere radius; solved from `N` when absent.
    #[serde(default)]
    pub r: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Fixed query points; drawn from the Gaussian when absent.
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_attempts")]
    pub typical_attempts: usize,
    #[serde(default = "default_mc_budget")]
    pub mc_budget: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub typicality: TypicalityConfig,
}

fn default_attempts() -> usize {
    20
}

fn default_mc_budget() -> u64 {
    100_000
}

fn default_bootstrap() -> usize {
    200
}

impl DistinguishConfig {
    pub fn new(n: usize, q: usize, halfspaces: usize, trials: u64, seed: u64) -> Self {
        Self {
            n,
            q,
            halfspaces,
            r: None,
            trials,
            seed,
            points: None,
            typical_attempts: default_attempts(),
            mc_budget: default_mc_budget(),
            bootstrap: default_bootstrap(),
            typicality: TypicalityConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalDeviation {
    pub radius: f64,
    pub rho: f64,
    pub frequency: f64,
    /// `(frequency - rho) / sigma` with `sigma` the binomial deviation under `rho`.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub params: LowerBoundParams,
    pub points: Vec<Vec<f64>>,
    pub typicality: TypicalityReport,
    /// Whether a typical point set was found within the attempt budget.
    pub typical_found: bool,
    pub attempts: usize,
    pub trials: u64,
    /// Total variation between the empirical polytope-label histogram and the
    /// exact product law.
    pub tv: f64,
    pub tv_ci: (f64, f64),
    /// The same statistic for a product-law sample of equal size, i.e. the
    /// finite-sample bias of the estimator.
    pub null_floor: f64,
    pub marginals: Vec<MarginalDeviation>,
    /// Frequency of polytopes whose halfspace matrix on the points is not nice.
    pub bad_matrix_frequency: f64,
}

pub fn distinguishing_experiment(cfg: &DistinguishConfig) -> Result<DistinguishReport> {
    let (n, q) = (cfg.n, cfg.q);
    if q == 0 || q > MAX_Q {
        return Err(Error::param(format!("q must lie in 1..={MAX_Q}, got {q}")));
    }
    if cfg.trials < MIN_TRIALS {
        return Err(Error::param(format!(
            "trials must be at least {MIN_TRIALS}, got {}",
            cfg.trials
        )));
    }
    if cfg.halfspaces == 0 {
        return Err(Error::param("need at least one halfspace"));
    }
    let params = if cfg.halfspaces >= 2 {
        LowerBoundParams::with_overrides(n, Some(cfg.halfspaces), Some(q), cfg.r)?
    } else {
        let r = cfg
            .r
            .ok_or_else(|| Error::param("a single halfspace needs an explicit r"))?;
        let mut p = LowerBoundParams::with_overrides(n, Some(2), Some(q), Some(r))?;
        p.halfspaces = 1;
        p
    };
    let table = CapTable::with_closed_form_small_n(n)?;
    let r = params.r;

    // query points: given, or the first typical draw
    let mut attempts = 0;
    let (points, typicality) = match &cfg.points {
        Some(pts) => {
            if pts.len() != q {
                return Err(Error::param(format!("expected {q} points, got {}", pts.len())));
            }
            attempts = 1;
            let rep = typicality_check(
                pts,
                &table,
                r,
                cfg.mc_budget,
                cfg.typicality,
                rng::split_seed(cfg.seed, 1),
            )?;
            (pts.clone(), rep)
        }
        None => {
            let mut s = rng::stream(cfg.seed, 0);
            let mut last = None;
            for k in 0..cfg.typical_attempts.max(1) {
                attempts = k + 1;
                let pts: Vec<Vec<f64>> = (0..q).map(|_| gaussian_point(&mut s, n)).collect();
                let rep = typicality_check(
                    &pts,
                    &table,
                    r,
                    cfg.mc_budget,
                    cfg.typicality,
                    rng::split_seed(cfg.seed, 1 + k as u64),
                )?;
                let done = rep.is_typical == Some(true);
                last = Some((pts, rep));
                if done {
                    break;
                }
            }
            last.expect("at least one attempt")
        }
    };
    let typical_found = typicality.is_typical == Some(true);

    let rho = params.rho();
    let marg: Vec<f64> = points.iter().map(|z| rho.eval(norm(z))).collect();
    let cells = 1usize << q;
    let product: Vec<f64> = (0..cells)
        .map(|c| {
            (0..q)
                .map(|i| if c >> i & 1 == 1 { marg[i] } else { 1.0 - marg[i] })
                .product()
        })
        .collect();

    let halfspaces = params.halfspaces;
    // per chunk: cell histogram and bad-matrix count
    let parts = rng::par_chunks(cfg.trials as usize, rng::split_seed(cfg.seed, 2), |s, len| {
        let mut hist = vec![0u64; cells];
        let mut bad = 0u64;
        for _ in 0..len {
            let polytope = RandomPolytope {
                r,
                normals: (0..halfspaces).map(|_| sphere_point(s, n, r)).collect(),
                seed: 0,
            };
            let m = HalfspaceMatrix::from_polytope(&points, &polytope);
            let cell = (0..q).filter(|&i| m.row_label(i)).fold(0, |c, i| c | 1 << i);
            hist[cell] += 1;
            if !nice_matrix_check(&m) {
                bad += 1;
            }
        }
        (hist, bad)
    });
    let mut hist = vec![0u64; cells];
    let mut bad = 0u64;
    for (h, b) in parts {
        hist.iter_mut().zip(h).for_each(|(a, v)| *a += v);
        bad += b;
    }
    let trials = cfg.trials;
    let tv = tv_to(&hist, trials, &product);

    // bootstrap over trials: resample the recorded cells
    let cell_list: Vec<usize> = hist
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat_n(c, k as usize))
        .collect();
    let mut boots: Vec<f64> = rng::par_chunks(cfg.bootstrap, rng::split_seed(cfg.seed, 3), |s, len| {
        (0..len)
            .map(|_| {
                let mut h = vec![0u64; cells];
                for _ in 0..trials {
                    h[cell_list[s.random_range(0..cell_list.len())]] += 1;
                }
                tv_to(&h, trials, &product)
            })
            .collect::<Vec<_>>()
    })
    .concat();
    boots.sort_by(f64::total_cmp);
    let tv_ci = if boots.is_empty() {
        (tv, tv)
    } else {
        let at = |p: f64| boots[((boots.len() - 1) as f64 * p).round() as usize];
        (at(0.025), at(0.975))
    };

    // the estimator's floor: product-law draws scored against the product law
    let null_parts = rng::par_chunks(trials as usize, rng::split_seed(cfg.seed, 4), |s, len| {
        let mut h = vec![0u64; cells];
        for _ in 0..len {
            let mut c = 0usize;
            for (i, p) in marg.iter().enumerate() {
                if s.random::<f64>() < *p {
                    c |= 1 << i;
                }
            }
            h[c] += 1;
        }
        h
    });
    let mut null_hist = vec![0u64; cells];
    for h in null_parts {
        null_hist.iter_mut().zip(h).for_each(|(a, v)| *a += v);
    }
    let null_floor = tv_to(&null_hist, trials, &product);

    let marginals = points
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let ones: u64 = hist
                .iter()
                .enumerate()
                .filter(|(c, _)| c >> i & 1 == 1)
                .map(|(_, k)| k)
                .sum();
            let f = ones as f64 / trials as f64;
            let p = marg[i];
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            MarginalDeviation {
                radius: norm(z),
                rho: p,
                frequency: f,
                z_score: if sigma > 0.0 {
                    (f - p) / sigma
                } else if f == p {
                    0.0
                } else {
                    f64::INFINITY
                },
            }
        })
        .collect();

    Ok(DistinguishReport {
        params,
        points,
        typicality,
        typical_found,
        attempts,
        trials,
        tv,
        tv_ci,
        null_floor,
        marginals,
        bad_matrix_frequency: bad as f64 / trials as f64,
    })
}

fn tv_to(hist: &[u64], total: u64, law: &[f64]) -> f64 {
    0.5 * hist
        .iter()
        .zip(law)
        .map(|(&k, p)| (k as f64 / total as f64 - p).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_large_q_and_few_trials() {
        assert!(distinguishing_experiment(&DistinguishConfig::new(8, 13, 16, 10_000, 0)).is_err());
        assert!(distinguishing_experiment(&DistinguishConfig::new(8, 2, 16, 100, 0)).is_err());
    }

    #[test]
    fn single_query_is_its_marginal() {
        let mut cfg = DistinguishConfig::new(8, 1, 16, 20_000, 11);
        cfg.typical_attempts = 1;
        cfg.bootstrap = 20;
        let rep = distinguishing_experiment(&cfg).unwrap();
        let m = &rep.marginals[0];
        assert!((rep.tv - (m.frequency - m.rho).abs()).abs() < 1e-12);
        assert!(m.z_score.abs() <= 4.0);
    }

    #[test]
    fn antipodal_pair_under_one_halfspace() {
        let mut cfg = DistinguishConfig::new(3, 2, 1, 20_000, 5);
        cfg.r = Some(1.0);
        cfg.points = Some(vec![vec![4.0, 0.0, 0.0], vec![-4.0, 0.0, 0.0]]);
        cfg.bootstrap = 20;
        let rep = distinguishing_experiment(&cfg).unwrap();
        // n = 3: cap(t) = (1 - t) / 2, so c = 3/8 and the exact distance is 2 c^2
        let c: f64 = 0.375;
        let exact = 2.0 * c * c;
        assert!((rep.tv - exact).abs() < 0.02, "tv {} exact {exact}", rep.tv);
        assert!(rep.tv > rep.null_floor);
    }
}
