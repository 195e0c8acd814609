//! Typicality of query points: the caps of directions that exclude them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{dot, norm, sphere_point, CapTable};
use crate::rng;

/// Exponents in the typicality window `[e^{-lower r^2}, e^{-upper r^2}]` and
/// the pairwise ceiling `e^{-pair r^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypicalityConfig {
    pub lower_exp: f64,
    pub upper_exp: f64,
    pub pair_exp: f64,
}

impl Default for TypicalityConfig {
    fn default() -> Self {
        Self {
            lower_exp: 0.51,
            upper_exp: 0.49,
            pair_exp: 0.96,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub fsa_lower: f64,
    pub fsa_upper: f64,
    pub pair_upper: f64,
    pub config: TypicalityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFsa {
    pub i: usize,
    pub j: usize,
    pub estimate: f64,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalityReport {
    /// `fsa(cover(z_i)) = cap(r / |z_i|)`, 0 inside `Ball(r)`.
    pub fsa: Vec<f64>,
    pub pairwise: Vec<PairFsa>,
    pub mc_budget: u64,
    pub thresholds: Thresholds,
    pub singles_ok: bool,
    /// Fewer than 10 expected hits at the pairwise ceiling.
    pub pairwise_indeterminate: bool,
    /// `None` when the verdict hinges on an indeterminate pairwise estimate.
    pub is_typical: Option<bool>,
}

/// Exact per-point cap fractions, Monte Carlo pairwise intersections on the
/// sphere of radius `r` (one shared batch of directions for all pairs).
pub fn typicality_check(
    points: &[Vec<f64>],
    table: &CapTable,
    r: f64,
    mc_budget: u64,
    config: TypicalityConfig,
    seed: u64,
) -> Result<TypicalityReport> {
    let n = table.n;
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if points.len() > 64 {
        return Err(Error::param("typicality check supports at most 64 points"));
    }
    let r2 = r * r;
    let thresholds = Thresholds {
        fsa_lower: (-config.lower_exp * r2).exp(),
        fsa_upper: (-config.upper_exp * r2).exp(),
        pair_upper: (-config.pair_exp * r2).exp(),
        config,
    };
    let fsa: Vec<f64> = points
        .iter()
        .map(|z| {
            let len = norm(z);
            if len <= r {
                0.0
            } else {
                table.cap(r / len)
            }
        })
        .collect();
    let singles_ok = fsa
        .iter()
        .all(|f| *f >= thresholds.fsa_lower && *f <= thresholds.fsa_upper);

    let q = points.len();
    let pair_counts = rng::par_chunks(mc_budget as usize, seed, |s, len| {
        let mut counts = vec![0u64; q * q];
        for _ in 0..len {
            let y = sphere_point(s, n, r);
            let mask: u64 = points
                .iter()
                .enumerate()
                .filter(|(_, z)| dot(z, &y) > r2)
                .fold(0, |m, (i, _)| m | 1 << i);
            if mask.count_ones() < 2 {
                continue;
            }
            for i in 0..q {
                if mask >> i & 1 == 0 {
                    continue;
                }
                for j in i + 1..q {
                    if mask >> j & 1 == 1 {
                        counts[i * q + j] += 1;
                    }
                }
            }
        }
        counts
    })
    .into_iter()
    .fold(vec![0u64; q * q], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    });
    let mut pairwise = Vec::new();
    for i in 0..q {
        for j in i + 1..q {
            let hits = pair_counts[i * q + j];
            pairwise.push(PairFsa {
                i,
                j,
                estimate: hits as f64 / mc_budget.max(1) as f64,
                hits,
            });
        }
    }
    let pairwise_indeterminate = (mc_budget as f64) * thresholds.pair_upper < 10.0;
    let pairs_ok = pairwise.iter().all(|p| p.estimate <= thresholds.pair_upper);
    let is_typical = if !singles_ok {
        Some(false)
    } else if pairwise_indeterminate {
        None
    } else {
        Some(pairs_ok)
    };
    Ok(TypicalityReport {
        fsa,
        pairwise,
        mc_budget,
        thresholds,
        singles_ok,
        pairwise_indeterminate,
        is_typical,
    })
}
