//! Two-sided testing by proper learning: empirical risk minimization over a
//! finite cover of convex sets, followed by a held-out disagreement test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::target::PointHull;
use crate::convex::{TargetSet, TargetSpec};
use crate::error::{Error, Result};
use crate::grid::{build_grid, generate_cover, CoverMode, GridParams, DEFAULT_COVER_CAP};
use crate::one_sided::Decision;
use crate::rng;
use crate::sample::{draw_labeled, SampleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Labeled draws used for scoring; `None` picks [`default_learn_samples`].
    pub learn_samples: Option<usize>,
    pub cover_subset_cap: u64,
    pub cover_mode: CoverMode,
    /// Per-candidate budget for the two-stage variant; `None` picks
    /// [`default_estimate_samples`].
    pub estimate_samples: Option<usize>,
    /// Fit the positive hull first, then return the nearest cover element.
    pub two_stage: bool,
}

impl LearnConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            learn_samples: None,
            cover_subset_cap: DEFAULT_COVER_CAP,
            cover_mode: CoverMode::Full,
            estimate_samples: None,
            two_stage: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 && self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("epsilon and delta must lie in (0, 1)"));
        }
        if self.learn_samples == Some(0) || self.estimate_samples == Some(0) {
            return Err(Error::param("sample budgets must be at least 1"));
        }
        Ok(())
    }
}

/// Hoeffding plus a union bound over the cover: `ceil(2 ln(2|C|/delta) / eps^2)`
/// draws put every empirical error within `eps` of its mean, with
/// probability `1 - delta`.
pub fn default_learn_samples(cover_size: usize, epsilon: f64, delta: f64) -> usize {
    (2.0 * (2.0 * cover_size as f64 / delta).ln() / (epsilon * epsilon)).ceil() as usize
}

/// `ceil(ln(4|C|/delta) * 50 / eps^2)`, so every distance estimate is within
/// `eps/5` with probability `1 - delta/2`.
pub fn default_estimate_samples(cover_size: usize, epsilon: f64, delta: f64) -> usize {
    ((4.0 * cover_size as f64 / delta).ln() * 50.0 / (epsilon * epsilon)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnResult {
    pub hypothesis: TargetSpec,
    pub hypothesis_index: usize,
    pub empirical_error: f64,
    pub candidates_scored: usize,
    pub learn_samples: usize,
    /// Stage-two distance samples, when the two-stage variant ran.
    pub estimate_samples: Option<usize>,
    /// Empirical error of every candidate, in cover order.
    #[serde(skip)]
    pub scores: Vec<f64>,
}

/// Index of the smallest score; ties go to the earliest candidate.
fn argmin(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = i;
        }
    }
    best
}

/// Number of points of `set` that `candidate` labels differently.
fn disagreements(candidate: &TargetSet, set: &SampleSet) -> usize {
    set.samples
        .iter()
        .filter(|s| candidate.contains(&s.x) != s.label)
        .count()
}

/// The candidate closest to `h` in sampled Gaussian distance, with every
/// candidate's estimate. All candidates share one batch of `samples` draws.
pub fn nearest_cover_element(h: &TargetSet, candidates: &[TargetSet], samples: usize, seed: u64) -> (usize, Vec<f64>) {
    let pool = draw_labeled(h, samples, seed);
    let dist: Vec<f64> = candidates
        .par_iter()
        .map(|c| disagreements(c, &pool) as f64 / samples as f64)
        .collect();
    (argmin(&dist), dist)
}

pub fn proper_learn_via_cover(
    target: &TargetSet,
    config: &LearnConfig,
    grid: &GridParams,
    seed: u64,
) -> Result<LearnResult> {
    config.validate()?;
    if target.dim() != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            got: target.dim(),
        });
    }
    let g = build_grid(grid)?;
    let cover = generate_cover(&g, config.cover_subset_cap, config.cover_mode)?;
    let built: Vec<TargetSet> = cover.iter().map(TargetSpec::build).collect::<Result<_>>()?;
    let m = config
        .learn_samples
        .unwrap_or_else(|| default_learn_samples(cover.len(), config.epsilon, config.delta));
    let learn = draw_labeled(target, m, rng::split_seed(seed, 0));
    let scores: Vec<f64> = built
        .par_iter()
        .map(|c| disagreements(c, &learn) as f64 / m as f64)
        .collect();

    if !config.two_stage {
        let best = argmin(&scores);
        return Ok(LearnResult {
            hypothesis: cover[best].clone(),
            hypothesis_index: best,
            empirical_error: scores[best],
            candidates_scored: cover.len(),
            learn_samples: m,
            estimate_samples: None,
            scores,
        });
    }

    // stage one: the hull of the positive samples; stage two: its nearest cover element
    let h = TargetSet::Hull(PointHull::new(grid.n, learn.positives().map(|x| x.to_vec()).collect())?);
    let k = config
        .estimate_samples
        .unwrap_or_else(|| default_estimate_samples(cover.len(), config.epsilon, config.delta));
    let (best, _) = nearest_cover_element(&h, &built, k, rng::split_seed(seed, 1));
    Ok(LearnResult {
        hypothesis: cover[best].clone(),
        hypothesis_index: best,
        empirical_error: scores[best],
        candidates_scored: cover.len(),
        learn_samples: m,
        estimate_samples: Some(k),
        scores,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedConfig {
    pub learn: LearnConfig,
    /// Constant `c` in the test budget `ceil(c ln(2/delta) / eps)`.
    pub test_constant: f64,
}

impl TwoSidedConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            learn: LearnConfig::new(epsilon, delta),
            test_constant: 8.0,
        }
    }

    pub fn test_samples(&self) -> usize {
        (self.test_constant * (2.0 / self.learn.delta).ln() / self.learn.epsilon).ceil() as usize
    }

    pub fn threshold(&self) -> f64 {
        0.75 * self.learn.epsilon
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedVerdict {
    pub decision: Decision,
    pub disagreement: f64,
    pub threshold: f64,
    pub test_samples: usize,
    pub learn: LearnResult,
}

/// Accepts iff the disagreement ratio is at most the threshold.
pub fn accept_rule(disagreement: f64, threshold: f64) -> Decision {
    if disagreement <= threshold {
        Decision::Accept
    } else {
        Decision::Reject
    }
}

/// Learns at `(eps/2, delta/2)`, then tests the hypothesis on fresh draws.
pub fn ggr_test(
    target: &TargetSet,
    config: &TwoSidedConfig,
    grid: &GridParams,
    seed: u64,
) -> Result<TwoSidedVerdict> {
    if !(config.test_constant > 0.0) {
        return Err(Error::param("test_constant must be positive"));
    }
    let mut inner = config.learn.clone();
    inner.epsilon /= 2.0;
    inner.delta /= 2.0;
    let learn = proper_learn_via_cover(target, &inner, grid, rng::split_seed(seed, 0))?;
    let h = learn.hypothesis.build()?;
    let m = config.test_samples();
    let test = draw_labeled(target, m, rng::split_seed(seed, 1));
    let disagreement = disagreements(&h, &test) as f64 / m as f64;
    let threshold = config.threshold();
    Ok(TwoSidedVerdict {
        decision: accept_rule(disagreement, threshold),
        disagreement,
        threshold,
        test_samples: m,
        learn,
    })
}
