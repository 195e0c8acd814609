//! The cube lattice over `Ball(2 n')`, cube classification, and the cube-hull cover.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::convex::hull::{solve_hull, LP_TOL};
use crate::convex::target::{cube_corners, PointHull, TargetSpec};
use crate::error::{Error, Result};
use crate::gauss::{normal_interval_mass, radial_band_mass};
use crate::sample::SampleSet;

pub const DEFAULT_CUBE_CAP: u64 = 10_000_000;
pub const DEFAULT_COVER_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub n: usize,
    pub epsilon: f64,
    pub ell: f64,
    pub n_prime: f64,
    pub cube_cap: u64,
    pub ell_overridden: bool,
    pub n_prime_overridden: bool,
}

/// `ell = eps^3 / n^4`.
pub fn default_ell(n: usize, epsilon: f64) -> f64 {
    epsilon.powi(3) / (n as f64).powi(4)
}

/// `n' = (n + 4 sqrt(n ln(4/eps)))^{1/2}`.
pub fn default_n_prime(n: usize, epsilon: f64) -> f64 {
    let nf = n as f64;
    (nf + 4.0 * (nf * (4.0 / epsilon).ln()).sqrt()).sqrt()
}

impl GridParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        Self::with_overrides(n, epsilon, None, None, None)
    }

    pub fn with_overrides(
        n: usize,
        epsilon: f64,
        ell: Option<f64>,
        n_prime: Option<f64>,
        cube_cap: Option<u64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        let ell_v = ell.unwrap_or_else(|| default_ell(n, epsilon));
        let np = n_prime.unwrap_or_else(|| default_n_prime(n, epsilon));
        if !(ell_v > 0.0 && ell_v.is_finite()) {
            return Err(Error::param(format!("cube side must be positive, got {ell_v}")));
        }
        if !(np > (n as f64).sqrt()) {
            return Err(Error::param(format!(
                "n' must exceed sqrt(n) = {}, got {np}",
                (n as f64).sqrt()
            )));
        }
        Ok(Self {
            n,
            epsilon,
            ell: ell_v,
            n_prime: np,
            cube_cap: cube_cap.unwrap_or(DEFAULT_CUBE_CAP),
            ell_overridden: ell.is_some(),
            n_prime_overridden: n_prime.is_some(),
        })
    }

    /// Per-axis bounds `[l i - l/2, l i + l/2)`.
    pub fn axis_bounds(&self, i: i64) -> (f64, f64) {
        let c = self.ell * i as f64;
        (c - self.ell / 2.0, c + self.ell / 2.0)
    }

    /// Index of the half-open interval holding `x` on one axis.
    pub fn axis_index(&self, x: f64) -> i64 {
        let mut i = (x / self.ell + 0.5).floor() as i64;
        let (lo, hi) = self.axis_bounds(i);
        if x < lo {
            i -= 1;
        } else if x >= hi {
            i += 1;
        }
        i
    }

    /// Largest `|i|` whose slab meets `[-2n', 2n']`.
    pub fn axis_radius(&self) -> i64 {
        (2.0 * self.n_prime / self.ell + 0.5).floor() as i64
    }

    /// `20 n^{5/8} n' sqrt(2 l sqrt(n))`, the bound on `Vol(BC)` for convex targets.
    pub fn boundary_mass_bound(&self) -> f64 {
        let nf = self.n as f64;
        20.0 * nf.powf(0.625) * self.n_prime * (2.0 * self.ell * nf.sqrt()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CubeIndex(pub Vec<i64>);

impl std::fmt::Display for CubeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

/// The materialized cube set with a reverse index.
#[derive(Debug, Clone)]
pub struct Grid {
    pub params: GridParams,
    pub cubes: Vec<CubeIndex>,
    lookup: HashMap<CubeIndex, usize>,
}

pub fn build_grid(params: &GridParams) -> Result<Grid> {
    let k = params.axis_radius();
    let per_axis = (2 * k + 1) as f64;
    let total = per_axis.powi(params.n as i32);
    if !(total <= params.cube_cap as f64) {
        return Err(Error::Infeasible {
            what: "grid",
            count: total,
            cap: params.cube_cap,
        });
    }
    let limit2 = (2.0 * params.n_prime).powi(2);
    let n = params.n;
    let mut cubes = Vec::new();
    let mut idx = vec![-k; n];
    loop {
        let d2: f64 = idx
            .iter()
            .map(|&i| {
                let (a, b) = params.axis_bounds(i);
                if a <= 0.0 && 0.0 <= b {
                    0.0
                } else {
                    a.abs().min(b.abs()).powi(2)
                }
            })
            .sum();
        if d2 <= limit2 {
            cubes.push(CubeIndex(idx.clone()));
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == n {
                let lookup = cubes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
                return Ok(Grid {
                    params: params.clone(),
                    cubes,
                    lookup,
                });
            }
            idx[j] += 1;
            if idx[j] <= k {
                break;
            }
            idx[j] = -k;
            j += 1;
        }
    }
}

pub fn cube_gaussian_mass(cube: &CubeIndex, params: &GridParams) -> f64 {
    cube.0
        .iter()
        .map(|&i| {
            let (a, b) = params.axis_bounds(i);
            normal_interval_mass(a, b)
        })
        .product()
}

impl Grid {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn position(&self, cube: &CubeIndex) -> Option<usize> {
        self.lookup.get(cube).copied()
    }

    /// Position of the cube holding `x`, if it is in the grid.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let idx: Vec<i64> = x.iter().map(|&v| self.params.axis_index(v)).collect();
        self.position(&CubeIndex(idx))
    }

    pub fn masses(&self) -> Vec<f64> {
        self.cubes
            .iter()
            .map(|c| cube_gaussian_mass(c, &self.params))
            .collect()
    }

    /// Positions of the Chebyshev neighbours of cube `pos` that are in the
    /// grid (the cube itself included), and whether any neighbour fell outside.
    pub fn neighbours(&self, pos: usize) -> (Vec<usize>, bool) {
        let n = self.params.n;
        let base = &self.cubes[pos].0;
        let mut out = Vec::new();
        let mut missing = false;
        let mut off = vec![-1i64; n];
        loop {
            let idx: Vec<i64> = base.iter().zip(&off).map(|(a, b)| a + b).collect();
            match self.position(&CubeIndex(idx)) {
                Some(p) => out.push(p),
                None => missing = true,
            }
            let mut j = 0;
            loop {
                if j == n {
                    return (out, missing);
                }
                off[j] += 1;
                if off[j] <= 1 {
                    break;
                }
                off[j] = -1;
                j += 1;
            }
        }
    }

    /// Exact mass of the grid's union, and of `Ball(n')` for comparison.
    pub fn coverage(&self) -> (f64, f64) {
        let total: f64 = self.masses().iter().sum();
        (total, radial_band_mass(self.params.n, 0.0, self.params.n_prime))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeClass {
    External,
    Boundary,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeClassification {
    pub classes: Vec<CubeClass>,
    pub masses: Vec<f64>,
    pub occupied: Vec<bool>,
    pub bc_mass: f64,
    pub ec_mass: f64,
    pub ic_mass: f64,
    /// Samples outside every grid cube.
    pub ignored: usize,
}

impl CubeClassification {
    pub fn count(&self, class: CubeClass) -> usize {
        self.classes.iter().filter(|c| **c == class).count()
    }

    pub fn all_occupied(&self) -> bool {
        self.occupied.iter().all(|v| *v)
    }

    /// Mass summed over `class`, in grid order.
    pub fn mass_of(&self, class: CubeClass) -> f64 {
        self.classes
            .iter()
            .zip(&self.masses)
            .filter(|(c, _)| **c == class)
            .map(|(_, m)| m)
            .sum()
    }
}

pub fn classify_cubes(t: &SampleSet, grid: &Grid) -> CubeClassification {
    classify_with_masses(t, grid, grid.masses())
}

pub(crate) fn classify_with_masses(t: &SampleSet, grid: &Grid, masses: Vec<f64>) -> CubeClassification {
    let m = grid.len();
    let mut pos = vec![false; m];
    let mut neg = vec![false; m];
    let mut occupied = vec![false; m];
    let mut ignored = 0;
    for s in &t.samples {
        match grid.locate(&s.x) {
            Some(p) => {
                occupied[p] = true;
                if s.label {
                    pos[p] = true;
                } else {
                    neg[p] = true;
                }
            }
            None => ignored += 1,
        }
    }
    let classes: Vec<CubeClass> = (0..m)
        .map(|p| {
            if !pos[p] {
                CubeClass::External
            } else if grid.neighbours(p).0.iter().any(|&q| neg[q]) {
                CubeClass::Boundary
            } else {
                CubeClass::Internal
            }
        })
        .collect();
    let mut c = CubeClassification {
        classes,
        masses,
        occupied,
        bc_mass: 0.0,
        ec_mass: 0.0,
        ic_mass: 0.0,
        ignored,
    };
    c.bc_mass = c.mass_of(CubeClass::Boundary);
    c.ec_mass = c.mass_of(CubeClass::External);
    c.ic_mass = c.mass_of(CubeClass::Internal);
    c
}

/// Writes `(index, class, mass)` rows, index coordinates joined by `;`.
pub fn write_classification_csv<W: Write>(
    grid: &Grid,
    classification: &CubeClassification,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "class", "mass"])?;
    for ((cube, class), mass) in grid
        .cubes
        .iter()
        .zip(&classification.classes)
        .zip(&classification.masses)
    {
        let class = match class {
            CubeClass::External => "external",
            CubeClass::Boundary => "boundary",
            CubeClass::Internal => "internal",
        };
        w.write_record([cube.to_string(), class.to_string(), format!("{mass:e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ContainmentOutcome {
    /// Every checked internal cube has all corners in `Conv(T+)`.
    Holds {
        checked: usize,
        /// Internal cubes with a neighbour outside the grid, which the
        /// containment argument does not reach.
        skipped_edge: usize,
    },
    Fails {
        cube: CubeIndex,
        corner: Vec<f64>,
    },
    /// Some cube holds no sample, so the premise is not met.
    HypothesisViolated {
        empty_cubes: usize,
    },
}

impl ContainmentOutcome {
    pub fn holds(&self) -> Option<bool> {
        match self {
            ContainmentOutcome::Holds { .. } => Some(true),
            ContainmentOutcome::Fails { .. } => Some(false),
            ContainmentOutcome::HypothesisViolated { .. } => None,
        }
    }
}

/// Checks that every internal cube lies in `Conv(T+)` by testing its corners.
pub fn internal_cube_containment_check(t: &SampleSet, grid: &Grid) -> ContainmentOutcome {
    let c = classify_cubes(t, grid);
    let empty = c.occupied.iter().filter(|v| !**v).count();
    if empty > 0 {
        return ContainmentOutcome::HypothesisViolated { empty_cubes: empty };
    }
    let n = grid.params.n;
    let positives: Vec<Vec<f64>> = t.positives().map(|x| x.to_vec()).collect();
    let planar = if n <= 2 {
        Some(PointHull::new(n, positives.clone()).expect("dimensions agree"))
    } else {
        None
    };
    let member = |p: &[f64]| match &planar {
        Some(h) => h.contains(p),
        None => solve_hull(p, &positives, LP_TOL).map(|s| s.member).unwrap_or(false),
    };
    let mut checked = 0;
    let mut skipped_edge = 0;
    for (p, class) in c.classes.iter().enumerate() {
        if *class != CubeClass::Internal {
            continue;
        }
        if grid.neighbours(p).1 {
            skipped_edge += 1;
            continue;
        }
        checked += 1;
        for corner in cube_corners(&grid.cubes[p].0, grid.params.ell) {
            if !member(&corner) {
                return ContainmentOutcome::Fails {
                    cube: grid.cubes[p].clone(),
                    corner,
                };
            }
        }
    }
    ContainmentOutcome::Holds {
        checked,
        skipped_edge,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    /// Every subset of the cube set.
    Full,
    /// Runs of consecutive cubes on the line (1D only).
    Contiguous1d,
}

/// Hulls of cube unions, deduplicated by their extreme corners. The empty
/// union comes first.
pub fn generate_cover(grid: &Grid, subset_cap: u64, mode: CoverMode) -> Result<Vec<TargetSpec>> {
    let n = grid.params.n;
    let ell = grid.params.ell;
    let k = grid.len();
    let mut out = vec![TargetSpec::CubeHull {
        n,
        ell,
        cubes: Vec::new(),
    }];
    match mode {
        CoverMode::Contiguous1d => {
            if n != 1 {
                return Err(Error::param("contiguous cover mode is one-dimensional"));
            }
            let count = (k * (k + 1) / 2 + 1) as f64;
            if count > subset_cap as f64 {
                return Err(Error::Infeasible {
                    what: "cover",
                    count,
                    cap: subset_cap,
                });
            }
            let mut sorted = grid.cubes.clone();
            sorted.sort();
            for a in 0..k {
                for b in a..k {
                    let cubes = if a == b {
                        vec![sorted[a].0.clone()]
                    } else {
                        vec![sorted[a].0.clone(), sorted[b].0.clone()]
                    };
                    out.push(TargetSpec::CubeHull { n, ell, cubes });
                }
            }
            Ok(out)
        }
        CoverMode::Full => {
            let count = 2f64.powi(k as i32);
            if k >= 63 || count > subset_cap as f64 {
                return Err(Error::Infeasible {
                    what: "cover",
                    count,
                    cap: subset_cap,
                });
            }
            let corners: Vec<Vec<Vec<f64>>> =
                grid.cubes.iter().map(|c| cube_corners(&c.0, ell)).collect();
            let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
            for mask in 1u64..(1u64 << k) {
                let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
                let pts: Vec<Vec<f64>> = members.iter().flat_map(|&i| corners[i].clone()).collect();
                let key_pts = if n <= 2 {
                    PointHull::new(n, pts)?.points
                } else {
                    let mut p = pts;
                    p.sort_by(|a, b| a.partial_cmp(b).expect("finite corners"));
                    p.dedup();
                    p
                };
                let mut key: Vec<Vec<u64>> = key_pts
                    .iter()
                    .map(|p| p.iter().map(|v| v.to_bits()).collect())
                    .collect();
                key.sort();
                if seen.insert(key.concat()) {
                    let cubes = members.iter().map(|&i| grid.cubes[i].0.clone()).collect();
                    out.push(TargetSpec::CubeHull { n, ell, cubes });
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::normal_cdf;
    use crate::sample::LabeledSample;

    fn line_grid() -> Grid {
        let p = GridParams::with_overrides(1, 0.1, Some(0.5), Some(2.0), None).unwrap();
        build_grid(&p).unwrap()
    }

    fn pts(v: &[(f64, bool)]) -> SampleSet {
        SampleSet::new(
            v.iter()
                .map(|&(x, label)| LabeledSample { x: vec![x], label })
                .collect(),
        )
    }

    #[test]
    fn line_grid_has_seventeen_cubes() {
        let g = line_grid();
        assert_eq!(g.len(), 17);
        let idx: Vec<i64> = g.cubes.iter().map(|c| c.0[0]).collect();
        assert_eq!(idx, (-8..=8).collect::<Vec<_>>());
    }

    #[test]
    fn half_open_membership() {
        let g = line_grid();
        assert_eq!(g.params.axis_index(0.25), 1);
        assert_eq!(g.params.axis_index(-0.25), 0);
        assert_eq!(g.params.axis_index(0.2499999), 0);
        assert_eq!(g.locate(&[4.3]), None);
    }

    #[test]
    fn cube_mass_matches_normal_cdf() {
        let g = line_grid();
        let m = cube_gaussian_mass(&CubeIndex(vec![0]), &g.params);
        assert!((m - (normal_cdf(0.25) - normal_cdf(-0.25))).abs() < 1e-15);
        assert!((m - 0.1974).abs() < 1e-4);
    }

    #[test]
    fn grid_mass_sandwich() {
        let p = GridParams::with_overrides(2, 0.2, Some(0.5), Some(1.5), None).unwrap();
        let g = build_grid(&p).unwrap();
        let (total, ball) = g.coverage();
        assert!(total >= ball && total <= 1.0 + 1e-12);
        assert!(g.position(&CubeIndex(vec![0, 0])).is_some());
    }

    #[test]
    fn planar_grid_is_symmetric() {
        let p = GridParams::with_overrides(2, 0.2, Some(0.7), Some(1.5), None).unwrap();
        let g = build_grid(&p).unwrap();
        for c in &g.cubes {
            let (a, b) = (c.0[0], c.0[1]);
            for img in [[b, a], [-a, b], [a, -b], [-b, -a]] {
                assert!(g.position(&CubeIndex(img.to_vec())).is_some());
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = GridParams::with_overrides(3, 0.2, Some(0.01), Some(2.0), Some(1000)).unwrap();
        match build_grid(&p) {
            Err(Error::Infeasible { what, count, .. }) => {
                assert_eq!(what, "grid");
                assert!(count > 1000.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn classification_by_hand() {
        let g = line_grid();
        let mut v = Vec::new();
        for i in -8..=8 {
            v.push((0.5 * i as f64, i <= 0));
        }
        let c = classify_cubes(&pts(&v), &g);
        for (cube, class) in g.cubes.iter().zip(&c.classes) {
            let i = cube.0[0];
            let expect = if i == 0 {
                CubeClass::Boundary
            } else if i < 0 {
                CubeClass::Internal
            } else {
                CubeClass::External
            };
            assert_eq!(*class, expect, "cube {i}");
        }
        assert!((c.bc_mass + c.ec_mass + c.ic_mass - g.coverage().0).abs() < 1e-14);
    }

    #[test]
    fn single_positive_and_same_cube_conflict() {
        let g = line_grid();
        let c = classify_cubes(&pts(&[(0.1, true)]), &g);
        assert_eq!(c.count(CubeClass::Internal), 1);
        assert_eq!(c.count(CubeClass::External), 16);
        let c = classify_cubes(&pts(&[(0.1, true), (-0.1, false)]), &g);
        assert_eq!(c.count(CubeClass::Boundary), 1);
    }

    #[test]
    fn containment_with_centres() {
        let g = line_grid();
        let v: Vec<(f64, bool)> = (-8..=8).map(|i| (0.5 * i as f64, true)).collect();
        let out = internal_cube_containment_check(&pts(&v), &g);
        assert_eq!(out.holds(), Some(true));
        let out = internal_cube_containment_check(&pts(&[(0.0, true)]), &g);
        assert_eq!(out, ContainmentOutcome::HypothesisViolated { empty_cubes: 16 });
    }

    #[test]
    fn cover_enumeration_two_cubes() {
        let p = GridParams::with_overrides(1, 0.5, Some(2.0), Some(1.05), None).unwrap();
        let g = build_grid(&p).unwrap();
        assert_eq!(g.len(), 3);
        let cover = generate_cover(&g, 1 << 10, CoverMode::Full).unwrap();
        // empty, three singletons, two adjacent pairs, the full span
        assert_eq!(cover.len(), 7);
        let contiguous = generate_cover(&g, 1 << 10, CoverMode::Contiguous1d).unwrap();
        assert_eq!(contiguous.len(), 7);
    }

    #[test]
    fn line_cover_counts_intervals() {
        let g = line_grid();
        let cover = generate_cover(&g, DEFAULT_COVER_CAP, CoverMode::Full).unwrap();
        assert_eq!(cover.len(), 17 * 18 / 2 + 1);
        assert!(generate_cover(&g, 1000, CoverMode::Full).is_err());
    }

    #[test]
    fn csv_export() {
        let g = line_grid();
        let c = classify_cubes(&pts(&[(0.1, true)]), &g);
        let mut buf = Vec::new();
        write_classification_csv(&g, &c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,class,mass\n"));
        assert!(text.contains("\n0,internal,"));
        assert_eq!(text.lines().count(), 18);
    }
}
