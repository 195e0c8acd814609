//! Convex-hull membership as LP feasibility.
//!
//! A point `p` lies in `Conv(g_1..g_k)` iff there are weights `lambda >= 0`
//! with `sum lambda = 1` and `sum lambda_i g_i = p`. Feasibility is decided
//! with a phase-one simplex under Bland's rule. When the floating-point
//! residual lands near the tolerance the same program is re-solved exactly
//! over the rationals.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feasibility tolerance on the infinity norm of the equality residual.
pub const LP_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullQuery {
    pub query_point: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
    pub lp_tol: f64,
}

impl HullQuery {
    pub fn new(query_point: Vec<f64>, generators: Vec<Vec<f64>>) -> Self {
        Self {
            query_point,
            generators,
            lp_tol: LP_TOL,
        }
    }
}

/// Outcome of one membership solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSolution {
    pub member: bool,
    /// Infinity-norm residual of the best floating-point weights.
    pub residual: f64,
    /// Generator indices with positive weight, and their weights.
    pub support: Vec<(usize, f64)>,
    /// Whether the verdict came from the exact rational re-solve.
    pub exact: bool,
}

pub fn conv_membership(query: &HullQuery) -> Result<bool> {
    Ok(solve_hull(&query.query_point, &query.generators, query.lp_tol)?.member)
}

/// Membership of `point` in the hull of `generators`, with the witness weights.
pub fn solve_hull(point: &[f64], generators: &[Vec<f64>], lp_tol: f64) -> Result<HullSolution> {
    let n = point.len();
    for g in generators {
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.len(),
            });
        }
    }
    if generators.is_empty() {
        return Ok(HullSolution {
            member: false,
            residual: f64::INFINITY,
            support: Vec::new(),
            exact: false,
        });
    }

    let float = phase_one::<f64>(point, generators, |x| x, FloatRules);
    let weights: Vec<f64> = match &float {
        Some(w) => w.iter().map(|v| v.max(0.0)).collect(),
        None => vec![0.0; generators.len()],
    };
    let residual = if float.is_some() {
        residual_inf(point, generators, &weights)
    } else {
        f64::INFINITY
    };
    let support: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(i, w)| (i, *w))
        .collect();

    let ambiguous = float.is_none() || (residual >= lp_tol / 10.0 && residual <= 10.0 * lp_tol);
    if !ambiguous {
        return Ok(HullSolution {
            member: residual <= lp_tol,
            residual,
            support,
            exact: false,
        });
    }

    let exact = phase_one::<BigRational>(point, generators, to_rational, ExactRules)
        .expect("exact simplex always terminates under Bland's rule");
    let member = exact_objective_is_zero(point, generators, &exact);
    let support = exact
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive_value())
        .map(|(i, w)| (i, to_f64(w)))
        .collect();
    Ok(HullSolution {
        member,
        residual,
        support,
        exact: true,
    })
}

fn residual_inf(point: &[f64], generators: &[Vec<f64>], weights: &[f64]) -> f64 {
    let n = point.len();
    let mut worst = (weights.iter().sum::<f64>() - 1.0).abs();
    for j in 0..n {
        let v: f64 = generators.iter().zip(weights).map(|(g, w)| g[j] * w).sum();
        worst = worst.max((v - point[j]).abs());
    }
    worst
}

fn exact_objective_is_zero(point: &[f64], generators: &[Vec<f64>], w: &[BigRational]) -> bool {
    let n = point.len();
    let total = w.iter().fold(BigRational::zero(), |acc, v| acc + v);
    if total != BigRational::one() {
        return false;
    }
    (0..n).all(|j| {
        let v = generators
            .iter()
            .zip(w)
            .fold(BigRational::zero(), |acc, (g, wi)| acc + to_rational(g[j]) * wi);
        v == to_rational(point[j])
    })
}

fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinates")
}

fn to_f64(x: &BigRational) -> f64 {
    let num: f64 = x.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = x.denom().to_string().parse().unwrap_or(f64::NAN);
    if num.is_finite() && den.is_finite() {
        num / den
    } else {
        // scale down huge numerators and denominators together
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
        let num = (x.numer() >> shift as usize).to_string().parse::<f64>().unwrap_or(0.0);
        let den = (x.denom() >> shift as usize).to_string().parse::<f64>().unwrap_or(1.0);
        num / den
    }
}

trait IsPositive {
    fn is_positive_value(&self) -> bool;
}

impl IsPositive for BigRational {
    fn is_positive_value(&self) -> bool {
        *self > BigRational::zero()
    }
}

/// Comparisons that differ between floating-point and exact arithmetic.
trait PivotRules<T> {
    fn is_improving(&self, reduced_cost: &T) -> bool;
    fn is_pivot(&self, entry: &T) -> bool;
    fn ratio_less(&self, a: &T, b: &T) -> bool;
    fn ratio_tied(&self, a: &T, b: &T) -> bool;
}

struct FloatRules;

impl PivotRules<f64> for FloatRules {
    fn is_improving(&self, c: &f64) -> bool {
        *c < -PIVOT_EPS
    }
    fn is_pivot(&self, e: &f64) -> bool {
        *e > PIVOT_EPS
    }
    fn ratio_less(&self, a: &f64, b: &f64) -> bool {
        *a < *b - PIVOT_EPS * (1.0 + b.abs())
    }
    fn ratio_tied(&self, a: &f64, b: &f64) -> bool {
        (a - b).abs() <= PIVOT_EPS * (1.0 + b.abs())
    }
}

struct ExactRules;

impl PivotRules<BigRational> for ExactRules {
    fn is_improving(&self, c: &BigRational) -> bool {
        *c < BigRational::zero()
    }
    fn is_pivot(&self, e: &BigRational) -> bool {
        *e > BigRational::zero()
    }
    fn ratio_less(&self, a: &BigRational, b: &BigRational) -> bool {
        a < b
    }
    fn ratio_tied(&self, a: &BigRational, b: &BigRational) -> bool {
        a == b
    }
}

trait Field:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl Field for f64 {}
impl Field for BigRational {}

/// Phase-one simplex on `[G; 1^T] lambda = [p; 1]`, `lambda >= 0`, with one
/// artificial per row. Returns the structural weights at the optimum, or
/// `None` if the iteration cap was hit.
fn phase_one<T: Field>(
    point: &[f64],
    generators: &[Vec<f64>],
    convert: impl Fn(f64) -> T,
    rules: impl PivotRules<T>,
) -> Option<Vec<T>> {
    let n = point.len();
    let k = generators.len();
    let m = n + 1;
    let width = k + m + 1;
    let rhs_col = k + m;
    let mut tab: Vec<T> = vec![T::zero(); (m + 1) * width];

    for row in 0..m {
        let (b, flip) = if row < n {
            (point[row], point[row] < 0.0)
        } else {
            (1.0, false)
        };
        let sign = |v: T| if flip { -v } else { v };
        for (i, g) in generators.iter().enumerate() {
            let a = if row < n { convert(g[row]) } else { T::one() };
            tab[row * width + i] = sign(a);
        }
        tab[row * width + k + row] = T::one();
        tab[row * width + rhs_col] = sign(convert(b));
    }
    // objective row: minimise the sum of artificials, priced out
    let obj = m * width;
    for col in 0..k {
        let mut s = T::zero();
        for row in 0..m {
            s = s + tab[row * width + col].clone();
        }
        tab[obj + col] = -s;
    }
    let mut s = T::zero();
    for row in 0..m {
        s = s + tab[row * width + rhs_col].clone();
    }
    tab[obj + rhs_col] = -s;

    let mut basis: Vec<usize> = (0..m).map(|r| k + r).collect();
    let max_iter = 50 * (k + m) + 1000;

    for _ in 0..max_iter {
        let Some(enter) = (0..k + m).find(|&c| rules.is_improving(&tab[obj + c])) else {
            let mut weights = vec![T::zero(); k];
            for (row, &b) in basis.iter().enumerate() {
                if b < k {
                    weights[b] = tab[row * width + rhs_col].clone();
                }
            }
            return Some(weights);
        };

        let mut leave: Option<(usize, T)> = None;
        for row in 0..m {
            let e = &tab[row * width + enter];
            if !rules.is_pivot(e) {
                continue;
            }
            let ratio = tab[row * width + rhs_col].clone() / e.clone();
            leave = match leave {
                None => Some((row, ratio)),
                Some((best, best_ratio)) => {
                    if rules.ratio_less(&ratio, &best_ratio)
                        || (rules.ratio_tied(&ratio, &best_ratio) && basis[row] < basis[best])
                    {
                        Some((row, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        // phase one is bounded below, so an entering column always has a pivot row
        let (prow, _) = leave?;
        pivot(&mut tab, width, m + 1, prow, enter);
        basis[prow] = enter;
    }
    None
}

fn pivot<T: Field>(tab: &mut [T], width: usize, rows: usize, prow: usize, pcol: usize) {
    let p = tab[prow * width + pcol].clone();
    for c in 0..width {
        let v = tab[prow * width + c].clone() / p.clone();
        tab[prow * width + c] = v;
    }
    for r in 0..rows {
        if r == prow {
            continue;
        }
        let factor = tab[r * width + pcol].clone();
        if factor.is_zero() {
            continue;
        }
        for c in 0..width {
            let v = tab[r * width + c].clone() - factor.clone() * tab[prow * width + c].clone();
            tab[r * width + c] = v;
        }
    }
}

#[doc(hidden)]
pub fn exact_membership(point: &[f64], generators: &[Vec<f64>]) -> bool {
    match phase_one::<BigRational>(point, generators, to_rational, ExactRules) {
        Some(w) => exact_objective_is_zero(point, generators, &w),
        None => false,
    }
}
