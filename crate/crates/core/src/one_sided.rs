//! The one-sided tester `A*`, its amplified form `A'`, and certificate checks.
//!
//! Every rejection carries a witness that can be re-verified against the
//! oracle without trusting the tester's internal state.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::hull::{solve_hull, LP_TOL};
use crate::convex::target::PointHull;
use crate::convex::TargetSet;
use crate::error::{Error, Result};
use crate::gauss::{gaussian_point, norm};
use crate::grid::{build_grid, classify_with_masses, CubeClass, CubeIndex, Grid, GridParams};
use crate::rng;
use crate::sample::{draw_labeled, LabeledSample, SampleSet};

/// Forces the label to 0 outside `Ball(n')`.
pub fn truncate_labels(sample: LabeledSample, n_prime: f64) -> LabeledSample {
    if sample.label && norm(&sample.x) > n_prime {
        LabeledSample {
            x: sample.x,
            label: false,
        }
    } else {
        sample
    }
}

fn truncated_label(target: &TargetSet, x: &[f64], n_prime: f64) -> bool {
    norm(x) <= n_prime && target.contains(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedConfig {
    pub grid: GridParams,
    /// Samples per `A*` run.
    pub s: usize,
    /// Independent `A*` runs combined by `A'`.
    pub runs: usize,
    pub reject_threshold: f64,
    pub threshold_overridden: bool,
}

impl OneSidedConfig {
    /// Defaults: coupon-collector `s`, `ceil(1/eps)` runs, threshold `eps/4`.
    pub fn new(grid: &Grid) -> Self {
        Self {
            s: default_sample_budget(grid),
            runs: (1.0 / grid.params.epsilon).ceil() as usize,
            reject_threshold: grid.params.epsilon / 4.0,
            threshold_overridden: false,
            grid: grid.params.clone(),
        }
    }

    /// Raises the mass threshold strictly above the bound that `Vol(BC)`
    /// obeys for convex targets, so a mass rejection can only come from a
    /// set that is not convex.
    pub fn with_guarded_threshold(mut self) -> Self {
        let guarded = self.grid.boundary_mass_bound().next_up();
        if guarded > self.reject_threshold {
            self.reject_threshold = guarded;
            self.threshold_overridden = true;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.runs == 0 {
            return Err(Error::param("s and runs must be at least 1"));
        }
        if !(self.reject_threshold > 0.0) {
            return Err(Error::param("reject_threshold must be positive"));
        }
        Ok(())
    }
}

/// `ceil((ln(#cubes) + 3) / min cube mass)`: enough draws that every cube is
/// hit with probability about `1 - e^{-3}`.
pub fn default_sample_budget(grid: &Grid) -> usize {
    let min_mass = grid.masses().into_iter().fold(f64::INFINITY, f64::min);
    let v = (((grid.len() as f64).ln() + 3.0) / min_mass).ceil();
    if v.is_finite() && v < 1e12 {
        v as usize
    } else {
        usize::MAX
    }
}

/// `ceil(c / eps)`.
pub fn runs_for(epsilon: f64, c: f64) -> usize {
    (c / epsilon).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

/// A positive sample and a negative sample in adjacent cubes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    pub cube: CubeIndex,
    pub positive: Vec<f64>,
    pub negative_cube: CubeIndex,
    pub negative: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    BcMassExcess {
        bc_mass: f64,
        bound: f64,
        cubes: Vec<BoundaryWitness>,
    },
    HullViolation {
        witness_point: Vec<f64>,
        positive_generators: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

/// Which step ended the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    EmptyCube,
    BoundaryMass,
    HullViolation,
    FreshPointConsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub certificate: Option<Certificate>,
    pub stage: Stage,
    pub bc_mass: Option<f64>,
    pub samples_drawn: usize,
    /// For `A'`: index of the first rejecting run.
    pub rejecting_run: Option<usize>,
}

impl Verdict {
    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// The grid and its masses, built once and reused across runs.
#[derive(Debug, Clone)]
pub struct OneSidedTester {
    pub config: OneSidedConfig,
    pub grid: Grid,
    masses: Vec<f64>,
}

impl OneSidedTester {
    pub fn new(config: OneSidedConfig) -> Result<Self> {
        config.validate()?;
        let grid = build_grid(&config.grid)?;
        let masses = grid.masses();
        Ok(Self {
            config,
            grid,
            masses,
        })
    }

    pub fn run_a_star(&self, target: &TargetSet, seed: u64) -> Result<Verdict> {
        let n = self.config.grid.n;
        if target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: target.dim(),
            });
        }
        let n_prime = self.config.grid.n_prime;
        // step 1
        let mut t = draw_labeled(target, self.config.s, rng::split_seed(seed, 0));
        t.samples = t
            .samples
            .into_iter()
            .map(|s| truncate_labels(s, n_prime))
            .collect();
        let accept = |stage, bc_mass| Verdict {
            decision: Decision::Accept,
            certificate: None,
            stage,
            bc_mass,
            samples_drawn: self.config.s,
            rejecting_run: None,
        };
        // step 2
        let c = classify_with_masses(&t, &self.grid, self.masses.clone());
        if !c.all_occupied() {
            return Ok(accept(Stage::EmptyCube, None));
        }
        // step 3
        if c.bc_mass >= self.config.reject_threshold {
            let cubes = self.boundary_witnesses(&t, &c.classes);
            return Ok(Verdict {
                decision: Decision::Reject,
                certificate: Some(Certificate::BcMassExcess {
                    bc_mass: c.bc_mass,
                    bound: self.config.reject_threshold,
                    cubes,
                }),
                stage: Stage::BoundaryMass,
                bc_mass: Some(c.bc_mass),
                samples_drawn: self.config.s,
                rejecting_run: None,
            });
        }
        // step 4
        let positives: Vec<Vec<f64>> = t.positives().map(|x| x.to_vec()).collect();
        let hull = PointHull::new(n, positives)?;
        // step 5: y is drawn untruncated, its label goes through the wrapper
        let mut ys = rng::stream(seed, 1);
        let y = gaussian_point(&mut ys, n);
        let label = truncated_label(target, &y, n_prime);
        if !label && hull.contains(&y) {
            let sol = solve_hull(&y, &hull.points, LP_TOL)?;
            if sol.member {
                let (idx, weights): (Vec<usize>, Vec<f64>) = sol.support.into_iter().unzip();
                return Ok(Verdict {
                    decision: Decision::Reject,
                    certificate: Some(Certificate::HullViolation {
                        witness_point: y,
                        positive_generators: idx.iter().map(|&i| hull.points[i].clone()).collect(),
                        weights,
                    }),
                    stage: Stage::HullViolation,
                    bc_mass: Some(c.bc_mass),
                    samples_drawn: self.config.s + 1,
                    rejecting_run: None,
                });
            }
        }
        let mut v = accept(Stage::FreshPointConsistent, Some(c.bc_mass));
        v.samples_drawn += 1;
        Ok(v)
    }

    fn boundary_witnesses(&self, t: &SampleSet, classes: &[CubeClass]) -> Vec<BoundaryWitness> {
        let m = self.grid.len();
        let mut pos: Vec<Option<&[f64]>> = vec![None; m];
        let mut neg: Vec<Option<&[f64]>> = vec![None; m];
        for s in &t.samples {
            if let Some(p) = self.grid.locate(&s.x) {
                let slot = if s.label { &mut pos[p] } else { &mut neg[p] };
                if slot.is_none() {
                    *slot = Some(&s.x);
                }
            }
        }
        let mut out = Vec::new();
        for p in 0..m {
            if classes[p] != CubeClass::Boundary {
                continue;
            }
            let (nbrs, _) = self.grid.neighbours(p);
            let q = nbrs
                .into_iter()
                .find(|&q| neg[q].is_some())
                .expect("a boundary cube has a negative neighbour");
            out.push(BoundaryWitness {
                cube: self.grid.cubes[p].clone(),
                positive: pos[p].expect("boundary cubes are positive").to_vec(),
                negative_cube: self.grid.cubes[q].clone(),
                negative: neg[q].unwrap().to_vec(),
            });
        }
        out
    }

    /// OR of `runs` independent `A*` runs; the certificate is the first
    /// rejecting run's.
    pub fn run_a_prime(&self, target: &TargetSet, seed: u64) -> Result<Verdict> {
        let runs = self.config.runs;
        let results: Vec<Result<Verdict>> = (0..runs)
            .into_par_iter()
            .map(|k| self.run_a_star(target, rng::split_seed(seed, k as u64)))
            .collect();
        let mut total = 0;
        let mut last = None;
        for (k, r) in results.into_iter().enumerate() {
            let mut v = r?;
            total += v.samples_drawn;
            if v.rejected() {
                v.rejecting_run = Some(k);
                v.samples_drawn = total;
                return Ok(v);
            }
            last = Some(v);
        }
        let mut v = last.expect("runs >= 1");
        v.samples_drawn = total;
        Ok(v)
    }
}

pub fn run_a_star(target: &TargetSet, config: &OneSidedConfig, seed: u64) -> Result<Verdict> {
    OneSidedTester::new(config.clone())?.run_a_star(target, seed)
}

pub fn run_a_prime(target: &TargetSet, config: &OneSidedConfig, seed: u64) -> Result<Verdict> {
    OneSidedTester::new(config.clone())?.run_a_prime(target, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// Every witness re-checks against the oracle and the arithmetic re-adds.
    pub verified: bool,
    /// Verified, and no convex set could have produced it.
    pub proves_nonconvexity: bool,
    pub detail: String,
}

/// Re-checks a certificate against the oracle, independent of the run.
pub fn verify_certificate(
    cert: &Certificate,
    target: &TargetSet,
    grid: &GridParams,
) -> CertificateCheck {
    let fail = |detail: String| CertificateCheck {
        verified: false,
        proves_nonconvexity: false,
        detail,
    };
    match cert {
        Certificate::HullViolation {
            witness_point,
            positive_generators,
            ..
        } => {
            if truncated_label(target, witness_point, grid.n_prime) {
                return fail("witness point is labeled positive".into());
            }
            if let Some(g) = positive_generators
                .iter()
                .find(|g| !truncated_label(target, g, grid.n_prime))
            {
                return fail(format!("generator {g:?} is not labeled positive"));
            }
            match solve_hull(witness_point, positive_generators, LP_TOL) {
                Ok(s) if s.member => CertificateCheck {
                    verified: true,
                    proves_nonconvexity: true,
                    detail: format!("witness in hull, residual {:.3e}", s.residual),
                },
                Ok(s) => fail(format!("witness not in hull, residual {:.3e}", s.residual)),
                Err(e) => fail(e.to_string()),
            }
        }
        Certificate::BcMassExcess { bound, cubes, .. } => {
            let g = match build_grid(grid) {
                Ok(g) => g,
                Err(e) => return fail(e.to_string()),
            };
            let mut seen = std::collections::BTreeSet::new();
            let mut mass = 0.0;
            for w in cubes {
                let (Some(p), Some(q)) = (g.locate(&w.positive), g.locate(&w.negative)) else {
                    return fail("witness outside the grid".into());
                };
                if g.cubes[p] != w.cube || g.cubes[q] != w.negative_cube {
                    return fail(format!("witness not in claimed cube {}", w.cube));
                }
                let adjacent = w
                    .cube
                    .0
                    .iter()
                    .zip(&w.negative_cube.0)
                    .all(|(a, b)| (a - b).abs() <= 1);
                if !adjacent {
                    return fail(format!("cubes {} and {} are not adjacent", w.cube, w.negative_cube));
                }
                if !truncated_label(target, &w.positive, grid.n_prime)
                    || truncated_label(target, &w.negative, grid.n_prime)
                {
                    return fail(format!("oracle disagrees with witness labels in cube {}", w.cube));
                }
                if seen.insert(p) {
                    mass += crate::grid::cube_gaussian_mass(&w.cube, grid);
                }
            }
            if mass < *bound {
                return fail(format!("re-summed mass {mass:e} is below {bound:e}"));
            }
            let convex_bound = grid.boundary_mass_bound();
            CertificateCheck {
                verified: true,
                proves_nonconvexity: mass > convex_bound,
                detail: format!("re-summed mass {mass:e}, convex bound {convex_bound:e}"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::TargetSpec;

    fn desk_config(grid: &Grid) -> OneSidedConfig {
        OneSidedConfig::new(grid).with_guarded_threshold()
    }

    fn desk_grid() -> Grid {
        let p = GridParams::with_overrides(2, 0.2, Some(0.5), Some(1.5), None).unwrap();
        build_grid(&p).unwrap()
    }

    #[test]
    fn truncation_rule() {
        let s = LabeledSample {
            x: vec![0.75, 0.0],
            label: true,
        };
        assert!(truncate_labels(s, 1.5).label);
        let s = LabeledSample {
            x: vec![3.0, 0.0],
            label: true,
        };
        assert!(!truncate_labels(s, 1.5).label);
    }

    #[test]
    fn starved_budget_accepts_early() {
        let g = desk_grid();
        let mut cfg = desk_config(&g);
        cfg.s = 10;
        let stripe = TargetSpec::Stripe { n: 2, thresholds: 5 }.build().unwrap();
        let v = run_a_star(&stripe, &cfg, 1).unwrap();
        assert_eq!(v.stage, Stage::EmptyCube);
        assert_eq!(v.decision, Decision::Accept);
    }

    #[test]
    fn full_space_is_accepted() {
        let g = desk_grid();
        let tester = OneSidedTester::new(desk_config(&g)).unwrap();
        let full = TargetSpec::Full { n: 2 }.build().unwrap();
        for seed in 0..3 {
            let v = tester.run_a_star(&full, seed).unwrap();
            assert_eq!(v.decision, Decision::Accept);
        }
    }

    #[test]
    fn stripe_rejections_carry_valid_certificates() {
        let g = desk_grid();
        let mut cfg = desk_config(&g);
        cfg.runs = 12;
        let tester = OneSidedTester::new(cfg).unwrap();
        let stripe = TargetSpec::Stripe { n: 2, thresholds: 5 }.build().unwrap();
        let mut rejections = 0;
        for seed in 0..4 {
            let v = tester.run_a_prime(&stripe, seed).unwrap();
            if let Some(cert) = &v.certificate {
                rejections += 1;
                let chk = verify_certificate(cert, &stripe, &tester.config.grid);
                assert!(chk.verified && chk.proves_nonconvexity, "{chk:?}");
            }
        }
        assert!(rejections >= 1);
    }

    #[test]
    fn unguarded_mass_rejection_does_not_prove_anything() {
        let g = desk_grid();
        let tester = OneSidedTester::new(OneSidedConfig::new(&g)).unwrap();
        let ball = TargetSpec::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        }
        .build()
        .unwrap();
        let v = tester.run_a_star(&ball, 5).unwrap();
        // at this coarse grid the boundary cubes of a convex ball weigh more than eps/4
        assert_eq!(v.stage, Stage::BoundaryMass);
        let chk = verify_certificate(v.certificate.as_ref().unwrap(), &ball, &g.params);
        assert!(chk.verified);
        assert!(!chk.proves_nonconvexity);
    }

    #[test]
    fn tampered_certificate_fails() {
        let ball = TargetSpec::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        }
        .build()
        .unwrap();
        let cert = Certificate::HullViolation {
            witness_point: vec![0.0, 0.0],
            positive_generators: vec![vec![0.5, 0.0], vec![-0.5, 0.1], vec![0.0, -0.5]],
            weights: vec![],
        };
        let g = desk_grid();
        assert!(!verify_certificate(&cert, &ball, &g.params).verified);
    }
}
