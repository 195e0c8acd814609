//! Labeled samples `(x, S(x))` drawn under the standard Gaussian.

use serde::{Deserialize, Serialize};

use crate::convex::TargetSet;
use crate::gauss::fill_gaussian;
use crate::rng::{self, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<LabeledSample>,
}

impl SampleSet {
    pub fn new(samples: Vec<LabeledSample>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `T+`.
    pub fn positives(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().filter(|s| s.label).map(|s| s.x.as_slice())
    }

    /// `T-`.
    pub fn negatives(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().filter(|s| !s.label).map(|s| s.x.as_slice())
    }
}

/// One labeled draw from `stream`.
pub fn draw_one(target: &TargetSet, s: &mut Stream) -> LabeledSample {
    let mut x = vec![0.0; target.dim()];
    fill_gaussian(s, &mut x);
    let label = target.contains(&x);
    LabeledSample { x, label }
}

/// `count` labeled draws, generated in parallel chunks keyed by `seed`.
pub fn draw_labeled(target: &TargetSet, count: usize, seed: u64) -> SampleSet {
    let samples = rng::par_chunks(count, seed, |s, len| {
        (0..len).map(|_| draw_one(target, s)).collect::<Vec<_>>()
    })
    .concat();
    SampleSet { samples }
}
