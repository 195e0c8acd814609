//! Gaussian sampling, chi-squared mass and tails, spherical caps, and the
//! survival probability `rho` of a point under random halfspaces.
//!
//! Exact quantities (cap areas, radial masses) are computed by adaptive
//! quadrature with an absolute tolerance of [`QUAD_TOL`]. Everything random
//! takes an explicit seed and is reproducible.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::rng::{self, Stream};

/// Absolute tolerance for cap and chi-mass quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Iteration ceiling for every bisection in this module.
pub const MAX_BISECTION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussParams {
    pub n: usize,
    pub seed: u64,
}

impl GaussParams {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("dimension n must be at least 1"));
        }
        Ok(Self { n, seed })
    }
}

pub fn fill_gaussian(rng: &mut Stream, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

pub fn gaussian_point(rng: &mut Stream, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    fill_gaussian(rng, &mut x);
    x
}

/// Uniform point on the origin-centred sphere of the given radius.
pub fn sphere_point(rng: &mut Stream, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let mut x = gaussian_point(rng, n);
        let len = norm(&x);
        if len > 0.0 {
            x.iter_mut().for_each(|v| *v *= radius / len);
            return x;
        }
    }
}

/// `count` i.i.d. standard normal points in `R^n`.
pub fn sample_gaussian(params: GaussParams, count: usize) -> Vec<Vec<f64>> {
    rng::par_chunks(count, params.seed, |rng, len| {
        (0..len)
            .map(|_| gaussian_point(rng, params.n))
            .collect::<Vec<_>>()
    })
    .concat()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

pub fn normal_sf(x: f64) -> f64 {
    normal_cdf(-x)
}

/// `Phi(b) - Phi(a)`, evaluated on whichever tail keeps full precision.
pub fn normal_interval_mass(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// Inverse of the standard normal CDF, polished with Newton steps.
pub fn normal_quantile(p: f64) -> f64 {
    let mut x = Normal::standard().inverse_cdf(p);
    if !x.is_finite() {
        return x;
    }
    for _ in 0..3 {
        let density = (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
        if density == 0.0 {
            break;
        }
        x -= (normal_cdf(x) - p) / density;
    }
    x
}

/// The chi-squared tail bound `exp(-(3/16) n t^2)`, valid for `t` in `[0, 1/2)`.
pub fn chi2_tail_bound(n: usize, t: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&t) {
        return Err(Error::param(format!("chi-squared tail needs t in [0, 1/2), got {t}")));
    }
    Ok((-(3.0 / 16.0) * n as f64 * t * t).exp())
}

/// Monte Carlo frequency of `| ||x||^2 - n | >= t n` over Gaussian draws.
pub fn chi2_tail_frequency(n: usize, t: f64, samples: usize, seed: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let hits = rng::par_count(samples, seed, |rng, len| {
        let mut x = vec![0.0; n];
        (0..len)
            .filter(|_| {
                fill_gaussian(rng, &mut x);
                (dot(&x, &x) - nf).abs() >= t * nf
            })
            .count() as u64
    });
    hits as f64 / samples as f64
}

/// Fractional surface area of spherical caps `{x in S^{n-1} : x_1 >= t}`.
///
/// For `n >= 3` this is `a_n * int_t^1 (1 - z^2)^{(n-3)/2} dz` with `a_n`
/// normalised so that `cap(0) = 1/2`. The circle (`n = 2`) uses the exact
/// `arccos(t) / pi` and must be requested explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapTable {
    pub n: usize,
    pub normalization: f64,
    pub quadrature_tol: f64,
}

impl CapTable {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param(format!(
                "cap quadrature needs n >= 3 (got {n}); use the closed-form variant for n = 2"
            )));
        }
        let exponent = (n as f64 - 3.0) / 2.0;
        let half = integrate(|z| (1.0 - z * z).powf(exponent), 0.0, 1.0, QUAD_TOL * 1e-3);
        Ok(Self {
            n,
            normalization: 0.5 / half,
            quadrature_tol: QUAD_TOL,
        })
    }

    /// Like [`CapTable::new`] but also accepts `n = 2` via the closed form.
    pub fn with_closed_form_small_n(n: usize) -> Result<Self> {
        match n {
            0 | 1 => Err(Error::param(format!("cap is undefined for n = {n}"))),
            2 => Ok(Self {
                n,
                normalization: 1.0 / PI,
                quadrature_tol: QUAD_TOL,
            }),
            _ => Self::new(n),
        }
    }

    /// `cap(t)`. Outside `[0, 1]` the natural extension is used: `0` for
    /// `t >= 1` and `1 - cap(-t)` for negative `t`.
    pub fn cap(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        if t <= -1.0 {
            return 1.0;
        }
        if t < 0.0 {
            return 1.0 - self.cap(-t);
        }
        if self.n == 2 {
            return t.acos() / PI;
        }
        let exponent = (self.n as f64 - 3.0) / 2.0;
        let tol = 0.1 * self.quadrature_tol / self.normalization;
        self.normalization * integrate(|z| (1.0 - z * z).max(0.0).powf(exponent), t, 1.0, tol)
    }

    /// Whether `cap(t) <= exp(-n t^2 / 2)` up to the quadrature tolerance.
    pub fn upper_bound_holds(&self, t: f64) -> bool {
        self.cap(t) <= (-(self.n as f64) * t * t / 2.0).exp() + self.quadrature_tol
    }
}

pub fn cap_upper_bound_check(n: usize, t: f64) -> Result<bool> {
    Ok(CapTable::new(n)?.upper_bound_holds(t))
}

/// Solves `cap(r / alpha) = 1 / halfspaces` for `r` in `[0, alpha)`.
pub fn solve_r(table: &CapTable, halfspaces: usize, alpha: f64) -> Result<f64> {
    if halfspaces < 2 {
        return Err(Error::param(format!("need at least 2 halfspaces, got {halfspaces}")));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::param(format!("alpha must be positive, got {alpha}")));
    }
    let target = 1.0 / halfspaces as f64;
    let f = |r: f64| table.cap(r / alpha) - target;
    let at_zero = f(0.0);
    if at_zero.abs() <= table.quadrature_tol {
        return Ok(0.0);
    }
    if at_zero < 0.0 || target <= table.quadrature_tol {
        return Err(Error::NoSignChange(format!(
            "cap(r/alpha) = 1/{halfspaces} is not resolvable on (0, alpha) at tolerance {}",
            table.quadrature_tol
        )));
    }
    let (mut lo, mut hi) = (0.0, alpha);
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    if f(r).abs() > table.quadrature_tol {
        return Err(Error::NoSignChange(format!(
            "bisection ended with residual {:e} above tolerance",
            f(r)
        )));
    }
    Ok(r)
}

/// `rho(x) = (1 - cap(r / x))^N`: the chance that a point at radius `x`
/// survives `N` random halfspaces `{y : y . u <= r^2}` with `u` uniform on the
/// sphere of radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoFn {
    pub table: CapTable,
    pub r: f64,
    pub halfspaces: usize,
}

impl RhoFn {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.r {
            return 1.0;
        }
        let c = self.table.cap(self.r / x);
        if c >= 1.0 {
            return 0.0;
        }
        (self.halfspaces as f64 * (-c).ln_1p()).exp()
    }
}

pub fn rho(x: f64, r: f64, halfspaces: usize, table: &CapTable) -> f64 {
    RhoFn {
        table: table.clone(),
        r,
        halfspaces,
    }
    .eval(x)
}

/// Density of the chi distribution (the law of `||x||` for `x ~ N(0, I_n)`).
#[derive(Debug, Clone, Copy)]
pub struct ChiDensity {
    n: usize,
    log_norm: f64,
}

impl ChiDensity {
    pub fn new(n: usize) -> Self {
        let half = n as f64 / 2.0;
        Self {
            n,
            log_norm: (half - 1.0) * 2f64.ln() + ln_gamma(half),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if self.n == 1 {
            return (-x * x / 2.0 - self.log_norm).exp();
        }
        if x == 0.0 {
            return 0.0;
        }
        ((self.n as f64 - 1.0) * x.ln() - x * x / 2.0 - self.log_norm).exp()
    }

    /// Radius beyond which the remaining mass is far below double precision.
    pub fn cutoff(&self) -> f64 {
        (self.n as f64).sqrt() + 40.0
    }

    /// `Pr[a <= ||x|| <= b]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let a = a.max(0.0);
        let b = b.min(self.cutoff());
        if b <= a {
            return 0.0;
        }
        integrate(|x| self.pdf(x), a, b, QUAD_TOL * 1e-2)
    }
}

/// Gaussian mass of the radial band `a <= ||x|| <= b` in `R^n`.
pub fn radial_band_mass(n: usize, a: f64, b: f64) -> f64 {
    ChiDensity::new(n).mass(a, b)
}

/// Clamped `alpha = max(sqrt(n) - 10, sqrt(n) / 2)`, with a flag telling
/// whether the clamp was active.
pub fn clamped_alpha(n: usize) -> (f64, bool) {
    let s = (n as f64).sqrt();
    let raw = s - 10.0;
    if raw < 0.5 * s {
        (0.5 * s, true)
    } else {
        (raw, false)
    }
}

fn rounded_power_of_two(exponent: f64, what: &str) -> Result<usize> {
    let v = exponent.exp2().round();
    if v > 1e9 {
        return Err(Error::param(format!(
            "default {what} = 2^{exponent:.3} is too large to materialize; pass an override"
        )));
    }
    Ok((v as usize).max(2))
}

/// Default halfspace count `N = round(2^sqrt(n))`, at least 2.
pub fn default_halfspaces(n: usize) -> Result<usize> {
    rounded_power_of_two((n as f64).sqrt(), "N")
}

/// Default query budget `q = round(2^(0.01 sqrt(n)))`, at least 2.
pub fn default_queries(n: usize) -> Result<usize> {
    rounded_power_of_two(0.01 * (n as f64).sqrt(), "q")
}

/// Parameters of the random-polytope lower-bound construction, together with
/// flags recording every clamp or override applied to the asymptotic defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub n: usize,
    pub halfspaces: usize,
    pub queries: usize,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_clamped: bool,
    pub halfspaces_overridden: bool,
    pub queries_overridden: bool,
    pub r_overridden: bool,
}

impl LowerBoundParams {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_overrides(n, None, None, None)
    }

    pub fn with_overrides(
        n: usize,
        halfspaces: Option<usize>,
        queries: Option<usize>,
        r: Option<f64>,
    ) -> Result<Self> {
        let table = CapTable::with_closed_form_small_n(n)?;
        let halfspaces_overridden = halfspaces.is_some();
        let queries_overridden = queries.is_some();
        let halfspaces = match halfspaces {
            Some(v) => v,
            None => default_halfspaces(n)?,
        };
        let queries = match queries {
            Some(v) => v,
            None => default_queries(n)?,
        };
        if queries == 0 {
            return Err(Error::param("query budget q must be positive"));
        }
        let (alpha, alpha_clamped) = clamped_alpha(n);
        let r_overridden = r.is_some();
        let r = match r {
            Some(v) if v > 0.0 => v,
            Some(v) => return Err(Error::param(format!("radius r must be positive, got {v}"))),
            None => solve_r(&table, halfspaces, alpha)?,
        };
        Ok(Self {
            n,
            halfspaces,
            queries,
            r,
            alpha,
            beta: (n as f64).sqrt() + 10.0,
            alpha_clamped,
            halfspaces_overridden,
            queries_overridden,
            r_overridden,
        })
    }

    pub fn cap_table(&self) -> CapTable {
        CapTable::with_closed_form_small_n(self.n).expect("validated at construction")
    }

    pub fn rho(&self) -> RhoFn {
        RhoFn {
            table: self.cap_table(),
            r: self.r,
            halfspaces: self.halfspaces,
        }
    }
}
