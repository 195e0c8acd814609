//! Membership oracles for the sets under test.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::hull::{solve_hull, LP_TOL};
use super::project::project_onto_polytope;
use crate::adversarial::dyes::sample_dyes;
use crate::adversarial::shells::{build_shells, default_shell_count, sample_dno, ShellPartition};
use crate::error::{Error, Result};
use crate::gauss::{dot, norm, normal_quantile, LowerBoundParams};

/// Serializable description of a target; reconstructs the same oracle bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Full {
        n: usize,
    },
    Empty {
        n: usize,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{x : normals[i] . x <= offsets[i]}`.
    Halfspaces {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// A draw from the random-polytope distribution. Missing `halfspaces`
    /// and `r` fall back to the lower-bound defaults for `n`. With
    /// `bound_box = Some(b)` the polytope is cut down to `[-b, b]^n`.
    RandomPolytope {
        n: usize,
        #[serde(default)]
        halfspaces: Option<usize>,
        #[serde(default)]
        r: Option<f64>,
        seed: u64,
        #[serde(default)]
        bound_box: Option<f64>,
    },
    /// `thresholds` equal-mass cut points along the first axis; slabs with an
    /// even index are in the set.
    Stripe {
        n: usize,
        thresholds: usize,
    },
    /// A draw from the random shell-union distribution.
    ShellUnion {
        n: usize,
        #[serde(default)]
        shells: Option<usize>,
        #[serde(default)]
        halfspaces: Option<usize>,
        #[serde(default)]
        r: Option<f64>,
        seed: u64,
    },
    /// Convex hull of the union of grid cubes with side `ell`.
    CubeHull {
        n: usize,
        ell: f64,
        cubes: Vec<Vec<i64>>,
    },
    PointHull {
        n: usize,
        points: Vec<Vec<f64>>,
    },
}

impl TargetSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TargetSpec::Full { .. } => "full",
            TargetSpec::Empty { .. } => "empty",
            TargetSpec::Ball { .. } => "ball",
            TargetSpec::Halfspaces { .. } => "halfspaces",
            TargetSpec::RandomPolytope { .. } => "random_polytope",
            TargetSpec::Stripe { .. } => "stripe",
            TargetSpec::ShellUnion { .. } => "shell_union",
            TargetSpec::CubeHull { .. } => "cube_hull",
            TargetSpec::PointHull { .. } => "point_hull",
        }
    }

    pub fn build(&self) -> Result<TargetSet> {
        TargetSet::from_spec(self)
    }
}

/// Intersection of halfspaces `normals[i] . x <= offsets[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    norms: Vec<f64>,
}

impl Polytope {
    pub fn new(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: normals.len(),
                got: offsets.len(),
            });
        }
        if let Some(first) = normals.first() {
            let n = first.len();
            if let Some(bad) = normals.iter().find(|a| a.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bad.len(),
                });
            }
        }
        let norms: Vec<f64> = normals.iter().map(|a| norm(a)).collect();
        if norms.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::param("halfspace normals must be non-zero and finite"));
        }
        Ok(Self {
            normals,
            offsets,
            norms,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| dot(a, x) <= *b)
    }

    /// Signed Euclidean distance to each bounding hyperplane, positive outside.
    pub fn face_distances(&self, x: &[f64]) -> Vec<f64> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .zip(&self.norms)
            .map(|((a, b), na)| (dot(a, x) - b) / na)
            .collect()
    }

    /// Distance from `x` to the polytope (0 inside).
    pub fn distance_to_set(&self, x: &[f64]) -> f64 {
        self.distance_with_filter(x, f64::INFINITY)
    }

    /// Distance from `x` to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let d = self.face_distances(x);
        if d.iter().all(|v| *v <= 0.0) {
            d.iter().map(|v| -v).fold(f64::INFINITY, f64::min)
        } else {
            self.distance_to_set(x)
        }
    }

    /// Whether `x` lies within `alpha` of the boundary. Faces further than
    /// `alpha` behind `x` cannot be active at a projection that close, so
    /// they are dropped before projecting.
    pub fn near_boundary(&self, x: &[f64], alpha: f64) -> bool {
        let d = self.face_distances(x);
        let worst = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if worst <= 0.0 {
            return d.iter().any(|v| -v <= alpha);
        }
        if worst > alpha {
            return false;
        }
        self.distance_with_filter(x, alpha) <= alpha
    }

    /// Whether `x` lies within `h` of the polytope.
    pub fn within_distance(&self, x: &[f64], h: f64) -> bool {
        let worst = self
            .face_distances(x)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= 0.0 {
            return true;
        }
        if worst > h {
            return false;
        }
        self.distance_with_filter(x, h) <= h
    }

    fn distance_with_filter(&self, x: &[f64], alpha: f64) -> f64 {
        let d = self.face_distances(x);
        if d.iter().all(|v| *v <= 0.0) {
            return 0.0;
        }
        let keep: Vec<usize> = (0..d.len()).filter(|&i| d[i] >= -alpha).collect();
        let normals: Vec<Vec<f64>> = keep.iter().map(|&i| self.normals[i].clone()).collect();
        let offsets: Vec<f64> = keep.iter().map(|&i| self.offsets[i]).collect();
        match project_onto_polytope(x, &normals, &offsets) {
            Some(p) => x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            None => f64::INFINITY,
        }
    }

    /// `(1 - beta) P`: offsets scale, normals stay.
    pub fn scaled(&self, factor: f64) -> Self {
        Polytope::new(
            self.normals.clone(),
            self.offsets.iter().map(|b| b * factor).collect(),
        )
        .expect("scaling keeps normals valid")
    }
}

/// Equal-mass slabs along the first axis, alternating in and out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stripe {
    pub n: usize,
    pub taus: Vec<f64>,
}

impl Stripe {
    pub fn new(n: usize, thresholds: usize) -> Self {
        let taus = (1..=thresholds)
            .map(|i| normal_quantile(i as f64 / (thresholds + 1) as f64))
            .collect();
        Self { n, taus }
    }

    /// Index `i` with `tau_i <= x_1 < tau_{i+1}`.
    pub fn slab(&self, x1: f64) -> usize {
        self.taus.partition_point(|t| *t <= x1)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.slab(x[0]) % 2 == 0
    }

    /// The distance to convexity of the one-dimensional section.
    pub fn distance_to_convexity(&self) -> f64 {
        // best interval: one "in" slab, or all of them with the gaps
        let k = self.taus.len();
        (k / 2) as f64 / (k + 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
enum HullRepr {
    Empty,
    Interval(f64, f64),
    Planar(Polytope),
    Generators,
}

/// Convex hull of a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointHull {
    pub n: usize,
    /// Points of the hull; for `n <= 2` only the extreme ones are kept.
    pub points: Vec<Vec<f64>>,
    repr: HullRepr,
}

impl PointHull {
    pub fn new(n: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if points.is_empty() {
            return Ok(Self {
                n,
                points,
                repr: HullRepr::Empty,
            });
        }
        match n {
            1 => {
                let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                let points = if lo == hi { vec![vec![lo]] } else { vec![vec![lo], vec![hi]] };
                Ok(Self {
                    n,
                    points,
                    repr: HullRepr::Interval(lo, hi),
                })
            }
            2 => {
                let vertices = convex_hull_2d(&points);
                let poly = polygon_halfplanes(&vertices);
                Ok(Self {
                    n,
                    points: vertices,
                    repr: HullRepr::Planar(poly),
                })
            }
            _ => Ok(Self {
                n,
                points,
                repr: HullRepr::Generators,
            }),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.repr, HullRepr::Empty)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.repr {
            HullRepr::Empty => false,
            HullRepr::Interval(lo, hi) => *lo <= x[0] && x[0] <= *hi,
            HullRepr::Planar(p) => p.contains(x),
            HullRepr::Generators => solve_hull(x, &self.points, LP_TOL)
                .map(|s| s.member)
                .unwrap_or(false),
        }
    }

    /// Halfspace form when one is available (`n <= 2`).
    pub fn as_polytope(&self) -> Option<Polytope> {
        match &self.repr {
            HullRepr::Interval(lo, hi) => {
                Some(Polytope::new(vec![vec![1.0], vec![-1.0]], vec![*hi, -*lo]).unwrap())
            }
            HullRepr::Planar(p) => Some(p.clone()),
            _ => None,
        }
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Halfplanes of a counter-clockwise polygon. Degenerate hulls (a point or
/// a segment) become the flat polytope they span.
fn polygon_halfplanes(v: &[Vec<f64>]) -> Polytope {
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    let mut push = |a: Vec<f64>, p: &[f64]| {
        let b = dot(&a, p);
        normals.push(a);
        offsets.push(b);
    };
    match v.len() {
        1 => {
            let p = &v[0];
            push(vec![1.0, 0.0], p);
            push(vec![-1.0, 0.0], p);
            push(vec![0.0, 1.0], p);
            push(vec![0.0, -1.0], p);
        }
        2 => {
            let d = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
            push(vec![d[1], -d[0]], &v[0]);
            push(vec![-d[1], d[0]], &v[0]);
            push(vec![d[0], d[1]], &v[1]);
            push(vec![-d[0], -d[1]], &v[0]);
        }
        k => {
            for i in 0..k {
                let a = &v[i];
                let b = &v[(i + 1) % k];
                push(vec![b[1] - a[1], a[0] - b[0]], a);
            }
        }
    }
    Polytope::new(normals, offsets).expect("hull edges have non-zero length")
}

/// Corners of the closed cube with index `idx` and side `ell`.
pub fn cube_corners(idx: &[i64], ell: f64) -> Vec<Vec<f64>> {
    let n = idx.len();
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|j| {
                    let c = ell * idx[j] as f64;
                    if mask >> j & 1 == 1 {
                        c + ell / 2.0
                    } else {
                        c - ell / 2.0
                    }
                })
                .collect()
        })
        .collect()
}

pub type OracleFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A user-supplied membership function.
#[derive(Clone)]
pub struct CustomOracle {
    pub n: usize,
    pub convex: bool,
    pub f: Arc<OracleFn>,
}

impl fmt::Debug for CustomOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomOracle")
            .field("n", &self.n)
            .field("convex", &self.convex)
            .finish_non_exhaustive()
    }
}

/// A membership oracle on `R^n`.
#[derive(Debug, Clone)]
pub enum TargetSet {
    Full { n: usize },
    Empty { n: usize },
    Ball { center: Vec<f64>, radius: f64 },
    Polytope { n: usize, poly: Polytope },
    Stripe(Stripe),
    Shells(ShellPartition),
    Hull(PointHull),
    Custom(CustomOracle),
}

impl TargetSet {
    pub fn from_spec(spec: &TargetSpec) -> Result<Self> {
        match spec {
            TargetSpec::Full { n } => Ok(TargetSet::Full { n: positive_dim(*n)? }),
            TargetSpec::Empty { n } => Ok(TargetSet::Empty { n: positive_dim(*n)? }),
            TargetSpec::Ball { center, radius } => {
                positive_dim(center.len())?;
                if !(*radius >= 0.0) {
                    return Err(Error::param(format!("ball radius must be >= 0, got {radius}")));
                }
                Ok(TargetSet::Ball {
                    center: center.clone(),
                    radius: *radius,
                })
            }
            TargetSpec::Halfspaces { normals, offsets } => {
                let n = normals
                    .first()
                    .map(|a| a.len())
                    .ok_or_else(|| Error::param("halfspaces needs at least one normal"))?;
                positive_dim(n)?;
                Ok(TargetSet::Polytope {
                    n,
                    poly: Polytope::new(normals.clone(), offsets.clone())?,
                })
            }
            TargetSpec::RandomPolytope {
                n,
                halfspaces,
                r,
                seed,
                bound_box,
            } => {
                let n = positive_dim(*n)?;
                let lb = LowerBoundParams::with_overrides(n, *halfspaces, Some(1), *r)?;
                let rp = sample_dyes(n, lb.halfspaces, lb.r, *seed)?;
                let mut poly = rp.to_polytope();
                if let Some(b) = bound_box {
                    if !(*b > 0.0) {
                        return Err(Error::param("bound_box must be positive"));
                    }
                    poly = with_box(&poly, n, *b);
                }
                Ok(TargetSet::Polytope { n, poly })
            }
            TargetSpec::Stripe { n, thresholds } => {
                Ok(TargetSet::Stripe(Stripe::new(positive_dim(*n)?, *thresholds)))
            }
            TargetSpec::ShellUnion {
                n,
                shells,
                halfspaces,
                r,
                seed,
            } => {
                let n = positive_dim(*n)?;
                let lb = LowerBoundParams::with_overrides(n, *halfspaces, Some(1), *r)?;
                let m = shells.unwrap_or_else(|| default_shell_count(n));
                let boundaries = build_shells(n, m)?;
                let rho = lb.rho();
                Ok(TargetSet::Shells(sample_dno(&boundaries, |x| rho.eval(x), *seed)))
            }
            TargetSpec::CubeHull { n, ell, cubes } => {
                let n = positive_dim(*n)?;
                if !(*ell > 0.0) {
                    return Err(Error::param("cube side must be positive"));
                }
                let mut pts = Vec::with_capacity(cubes.len() << n.min(20));
                for c in cubes {
                    if c.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: c.len(),
                        });
                    }
                    pts.extend(cube_corners(c, *ell));
                }
                Ok(TargetSet::Hull(PointHull::new(n, pts)?))
            }
            TargetSpec::PointHull { n, points } => {
                Ok(TargetSet::Hull(PointHull::new(positive_dim(*n)?, points.clone())?))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSet::Full { n } | TargetSet::Empty { n } | TargetSet::Polytope { n, .. } => *n,
            TargetSet::Ball { center, .. } => center.len(),
            TargetSet::Stripe(s) => s.n,
            TargetSet::Shells(s) => s.n,
            TargetSet::Hull(h) => h.n,
            TargetSet::Custom(c) => c.n,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            TargetSet::Full { .. } => true,
            TargetSet::Empty { .. } => false,
            TargetSet::Ball { center, radius } => dist2(x, center) <= radius * radius,
            TargetSet::Polytope { poly, .. } => poly.contains(x),
            TargetSet::Stripe(s) => s.contains(x),
            TargetSet::Shells(s) => s.contains(x),
            TargetSet::Hull(h) => h.contains(x),
            TargetSet::Custom(c) => (c.f)(x),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            TargetSet::Full { .. }
            | TargetSet::Empty { .. }
            | TargetSet::Ball { .. }
            | TargetSet::Polytope { .. }
            | TargetSet::Hull(_) => true,
            TargetSet::Stripe(s) => s.taus.is_empty(),
            TargetSet::Shells(s) => s.is_convex(),
            TargetSet::Custom(c) => c.convex,
        }
    }

    /// Distance from `x` to the set, where the kind supports it.
    pub fn distance_to_set(&self, x: &[f64]) -> Option<f64> {
        match self {
            TargetSet::Full { .. } => Some(0.0),
            TargetSet::Empty { .. } => Some(f64::INFINITY),
            TargetSet::Ball { center, radius } => Some((dist2(x, center).sqrt() - radius).max(0.0)),
            TargetSet::Polytope { poly, .. } => Some(poly.distance_to_set(x)),
            TargetSet::Hull(h) => {
                if h.is_empty() {
                    Some(f64::INFINITY)
                } else {
                    h.as_polytope().map(|p| p.distance_to_set(x))
                }
            }
            _ => None,
        }
    }

    /// Whether `x` is within `h` of the set, where supported.
    pub fn within_distance(&self, x: &[f64], h: f64) -> Option<bool> {
        match self {
            TargetSet::Polytope { poly, .. } => Some(poly.within_distance(x, h)),
            TargetSet::Hull(hull) if !hull.is_empty() => {
                hull.as_polytope().map(|p| p.within_distance(x, h))
            }
            _ => self.distance_to_set(x).map(|d| d <= h),
        }
    }

    /// Distance from `x` to the boundary of the set, where the kind supports it.
    pub fn boundary_distance(&self, x: &[f64]) -> Option<f64> {
        match self {
            TargetSet::Full { .. } | TargetSet::Empty { .. } => Some(f64::INFINITY),
            TargetSet::Ball { center, radius } => Some((dist2(x, center).sqrt() - radius).abs()),
            TargetSet::Polytope { poly, .. } => Some(poly.boundary_distance(x)),
            TargetSet::Stripe(s) => Some(
                s.taus
                    .iter()
                    .map(|t| (x[0] - t).abs())
                    .fold(f64::INFINITY, f64::min),
            ),
            TargetSet::Shells(s) => Some(s.boundary_distance(norm(x))),
            TargetSet::Hull(h) => {
                if h.is_empty() {
                    Some(f64::INFINITY)
                } else {
                    h.as_polytope().map(|p| p.boundary_distance(x))
                }
            }
            TargetSet::Custom(_) => None,
        }
    }

    /// Whether `x` is within `alpha` of the boundary, where supported.
    pub fn near_boundary(&self, x: &[f64], alpha: f64) -> Option<bool> {
        match self {
            TargetSet::Polytope { poly, .. } => Some(poly.near_boundary(x, alpha)),
            _ => self.boundary_distance(x).map(|d| d <= alpha),
        }
    }
}

fn positive_dim(n: usize) -> Result<usize> {
    if n == 0 {
        Err(Error::param("dimension must be positive"))
    } else {
        Ok(n)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn with_box(poly: &Polytope, n: usize, b: f64) -> Polytope {
    let mut normals = poly.normals.clone();
    let mut offsets = poly.offsets.clone();
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = s;
            normals.push(e);
            offsets.push(b);
        }
    }
    Polytope::new(normals, offsets).expect("box faces are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_roundtrip_json() {
        let spec = TargetSpec::Ball {
            center: vec![0.0, 1.0],
            radius: 2.0,
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"kind\":\"ball\""));
        let back: TargetSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let bad = serde_json::from_str::<TargetSpec>(r#"{"kind":"ball","center":[0],"radius":1,"extra":2}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn stripe_slabs_have_equal_mass() {
        let s = Stripe::new(1, 5);
        assert_eq!(s.taus.len(), 5);
        assert!((crate::gauss::normal_cdf(s.taus[2]) - 0.5).abs() < 1e-14);
        assert!(s.contains(&[-3.0]));
        assert!(!s.contains(&[s.taus[0]]));
        assert!(s.contains(&[s.taus[1]]));
        assert!((s.distance_to_convexity() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stripe_distance_matches_interval_search() {
        for k in 0..=9usize {
            let slabs = k + 1;
            let inside = |i: usize| i % 2 == 0;
            let total_in = (0..slabs).filter(|&i| inside(i)).count();
            // empty set, then every run of slabs [a, b]
            let mut best = total_in;
            for a in 0..slabs {
                for b in a..slabs {
                    let out_kept = (a..=b).filter(|&i| !inside(i)).count();
                    let in_missed = total_in - (a..=b).filter(|&i| inside(i)).count();
                    best = best.min(out_kept + in_missed);
                }
            }
            let want = best as f64 / slabs as f64;
            let got = Stripe::new(1, k).distance_to_convexity();
            assert!((got - want).abs() < 1e-15, "k = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn planar_hull_drops_interior_points() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 2.0],
            vec![0.0, 2.0],
            vec![1.0, 1.0],
            vec![1.0, 0.0],
        ];
        let h = PointHull::new(2, pts).unwrap();
        assert_eq!(h.points.len(), 4);
        assert!(h.contains(&[1.0, 1.9]));
        assert!(h.contains(&[2.0, 2.0]));
        assert!(!h.contains(&[2.1, 1.0]));
    }

    #[test]
    fn degenerate_planar_hulls() {
        let seg = PointHull::new(2, vec![vec![0.0, 0.0], vec![2.0, 2.0], vec![1.0, 1.0]]).unwrap();
        assert!(seg.contains(&[0.5, 0.5]));
        assert!(!seg.contains(&[0.5, 0.6]));
        assert!(!seg.contains(&[3.0, 3.0]));
        let pt = PointHull::new(2, vec![vec![1.0, 1.0]]).unwrap();
        assert!(pt.contains(&[1.0, 1.0]) && !pt.contains(&[1.0, 1.1]));
    }

    #[test]
    fn cube_hull_in_one_dimension() {
        let t = TargetSpec::CubeHull {
            n: 1,
            ell: 0.5,
            cubes: vec![vec![-1], vec![2]],
        }
        .build()
        .unwrap();
        assert!(t.contains(&[-0.75]) && t.contains(&[1.25]) && t.contains(&[0.3]));
        assert!(!t.contains(&[1.3]) && !t.contains(&[-0.8]));
        assert!(t.is_convex());
    }

    #[test]
    fn polytope_distances() {
        let sq = Polytope::new(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![1.0; 4],
        )
        .unwrap();
        assert!((sq.boundary_distance(&[0.5, 0.0]) - 0.5).abs() < 1e-12);
        assert!((sq.boundary_distance(&[4.0, 5.0]) - 5.0).abs() < 1e-9);
        assert!(sq.near_boundary(&[1.05, 1.05], 0.1));
        assert!(!sq.near_boundary(&[1.1, 1.1], 0.1));
        assert!(!sq.near_boundary(&[0.0, 0.0], 0.9));
    }

    #[test]
    fn random_polytope_contains_inner_ball() {
        let t = TargetSpec::RandomPolytope {
            n: 4,
            halfspaces: Some(8),
            r: Some(1.0),
            seed: 3,
            bound_box: None,
        }
        .build()
        .unwrap();
        assert!(t.contains(&[0.0; 4]));
        assert!(t.contains(&[0.5, -0.5, 0.5, -0.5]));
    }
}
