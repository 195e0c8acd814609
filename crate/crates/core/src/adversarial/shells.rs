//! Equal-mass radial shells and the random shell unions built on them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{norm, ChiDensity, MAX_BISECTION};
use crate::rng;

/// Radii `t_0 = 0 < t_1 < ... < t_M = 2 sqrt(n)` cutting `Ball(2 sqrt(n))`
/// into shells of equal Gaussian mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellBoundaries {
    pub n: usize,
    pub t: Vec<f64>,
}

impl ShellBoundaries {
    pub fn shells(&self) -> usize {
        self.t.len() - 1
    }

    /// Gaussian mass of shell `i` (1-based), `t_{i-1} <= ||x|| <= t_i`.
    pub fn shell_mass(&self, i: usize) -> f64 {
        ChiDensity::new(self.n).mass(self.t[i - 1], self.t[i])
    }
}

/// `max(2^ceil(sqrt n), 64)`, saturating.
pub fn default_shell_count(n: usize) -> usize {
    let e = (n as f64).sqrt().ceil() as u32;
    let p = if e >= 40 { 1usize << 40 } else { 1usize << e };
    p.max(64)
}

pub fn build_shells(n: usize, m: usize) -> Result<ShellBoundaries> {
    if n == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    if m == 0 {
        return Err(Error::param("shell count must be positive"));
    }
    let chi = ChiDensity::new(n);
    let top = 2.0 * (n as f64).sqrt();
    let total = chi.mass(0.0, top);
    let share = total / m as f64;
    let mut t = Vec::with_capacity(m + 1);
    t.push(0.0);
    for _ in 1..m {
        let prev = *t.last().unwrap();
        // mass(prev, x) is increasing in x; bisect for the equal share
        let (mut lo, mut hi) = (prev, top);
        for _ in 0..MAX_BISECTION {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if chi.mass(prev, mid) < share {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t.push(0.5 * (lo + hi));
    }
    t.push(top);
    Ok(ShellBoundaries { n, t })
}

/// A union of shells: shell `i` is kept with probability `rho(t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellPartition {
    pub n: usize,
    pub boundaries: Vec<f64>,
    pub included: Vec<bool>,
    /// `rho(t_i)` for `i = 1..=M`.
    pub rho_at_boundaries: Vec<f64>,
}

impl ShellPartition {
    /// Shell (1-based) containing radius `x`; `t_i` belongs to shell `i`.
    pub fn shell_of(&self, x: f64) -> Option<usize> {
        let top = *self.boundaries.last()?;
        if x > top {
            return None;
        }
        let i = self.boundaries[1..].partition_point(|t| *t < x);
        Some(i + 1)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.shell_of(norm(x)) {
            Some(i) => self.included[i - 1],
            None => false,
        }
    }

    /// A union of shells is convex only when it is a centred ball or empty.
    pub fn is_convex(&self) -> bool {
        let first_out = self.included.iter().position(|b| !b).unwrap_or(self.included.len());
        self.included[first_out..].iter().all(|b| !b)
    }

    /// Distance from radius `x` to the nearest sphere where membership flips.
    pub fn boundary_distance(&self, x: f64) -> f64 {
        let m = self.included.len();
        let mut best = f64::INFINITY;
        for j in 1..=m {
            let inside = self.included[j - 1];
            let outside = if j < m { self.included[j] } else { false };
            if inside != outside {
                best = best.min((x - self.boundaries[j]).abs());
            }
        }
        best
    }
}

pub fn sample_dno(
    boundaries: &ShellBoundaries,
    rho_fn: impl Fn(f64) -> f64,
    seed: u64,
) -> ShellPartition {
    let mut s = rng::stream(seed, 0);
    let rho_at_boundaries: Vec<f64> = boundaries.t[1..].iter().map(|&t| rho_fn(t)).collect();
    let included = rho_at_boundaries
        .iter()
        .map(|&p| s.random::<f64>() < p)
        .collect();
    ShellPartition {
        n: boundaries.n,
        boundaries: boundaries.t.clone(),
        included,
        rho_at_boundaries,
    }
}
