use convexity_testbed::adversarial::build_shells;
use convexity_testbed::convex::TargetSpec;
use convexity_testbed::gauss::{normal_cdf, rho, solve_r, CapTable};
use convexity_testbed::grid::{build_grid, classify_cubes, generate_cover, CoverMode, CubeClass, GridParams};
use convexity_testbed::sample::draw_labeled;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cap_is_decreasing_and_below_its_bound(n in 3usize..40, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let t = CapTable::new(n).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(t.cap(lo) + 1e-12 >= t.cap(hi));
        prop_assert!(t.cap(hi) <= (-(n as f64) * hi * hi / 2.0).exp() + 1e-9);
    }

    #[test]
    fn cap_symmetry(n in 3usize..30, t in 0.0f64..1.0) {
        let c = CapTable::new(n).unwrap();
        prop_assert!((c.cap(t) + c.cap(-t) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rho_is_non_increasing(n in 3usize..20, halfspaces in 2usize..64, x in 0.1f64..8.0, dx in 0.0f64..2.0) {
        let t = CapTable::new(n).unwrap();
        prop_assert!(rho(x + dx, 0.7, halfspaces, &t) <= rho(x, 0.7, halfspaces, &t) + 1e-12);
    }

    #[test]
    fn axis_index_brackets_its_input(ell in 0.05f64..2.0, x in -10.0f64..10.0) {
        let gp = GridParams::with_overrides(1, 0.2, Some(ell), Some(3.0), None).unwrap();
        let i = gp.axis_index(x);
        let (lo, hi) = gp.axis_bounds(i);
        prop_assert!(lo <= x && x < hi, "{x} not in [{lo}, {hi})");
    }

    #[test]
    fn classes_partition_grid_mass(seed in any::<u64>(), radius in 0.2f64..2.0, cx in -1.0f64..1.0) {
        let gp = GridParams::with_overrides(2, 0.2, Some(0.5), Some(1.5), None).unwrap();
        let g = build_grid(&gp).unwrap();
        let target = TargetSpec::Ball { center: vec![cx, 0.0], radius }.build().unwrap();
        let c = classify_cubes(&draw_labeled(&target, 2000, seed), &g);
        let total: f64 = g.masses().iter().sum();
        let parts = c.mass_of(CubeClass::External) + c.mass_of(CubeClass::Boundary) + c.mass_of(CubeClass::Internal);
        prop_assert!((total - parts).abs() < 1e-12);
        prop_assert!((c.bc_mass - c.mass_of(CubeClass::Boundary)).abs() < 1e-12);
    }
}

#[test]
fn solve_r_hits_its_anchor() {
    for n in [3usize, 5, 9, 16, 25] {
        let t = CapTable::new(n).unwrap();
        for halfspaces in [2usize, 8, 40] {
            let alpha = 0.5 * (n as f64).sqrt();
            let r = solve_r(&t, halfspaces, alpha).unwrap();
            let want = (1.0 - 1.0 / halfspaces as f64).powi(halfspaces as i32);
            assert!((rho(alpha, r, halfspaces, &t) - want).abs() < 1e-9, "n {n} N {halfspaces}");
        }
    }
}

#[test]
fn shells_match_chi_squared_quantiles() {
    // independent oracle: Pr[||x|| <= t] is the chi-squared CDF at t^2
    for (n, m) in [(3usize, 10usize), (6, 32)] {
        let b = build_shells(n, m).unwrap();
        let chi = ChiSquared::new(n as f64).unwrap();
        let top = chi.cdf(4.0 * n as f64);
        for (i, t) in b.t.iter().enumerate() {
            let want = top * i as f64 / m as f64;
            assert!((chi.cdf(t * t) - want).abs() < 1e-8, "n {n} shell {i}");
        }
    }
}

#[test]
fn cube_masses_cover_the_outer_ball() {
    let gp = GridParams::with_overrides(1, 0.1, Some(0.5), Some(2.0), None).unwrap();
    let g = build_grid(&gp).unwrap();
    assert_eq!(g.len(), 17);
    let total: f64 = g.masses().iter().sum();
    assert!((total - (normal_cdf(4.25) - normal_cdf(-4.25))).abs() < 1e-12);
}

#[test]
fn cover_elements_contain_their_cubes() {
    let gp = GridParams::with_overrides(2, 0.2, Some(2.0), Some(1.5), None).unwrap();
    let g = build_grid(&gp).unwrap();
    assert_eq!(g.len(), 13);
    let cover = generate_cover(&g, 1 << 20, CoverMode::Full).unwrap();
    assert!(cover.len() > 1);
    for spec in &cover {
        let TargetSpec::CubeHull { cubes, ell, .. } = spec else {
            panic!("cover elements are cube hulls");
        };
        let set = spec.build().unwrap();
        assert!(set.is_convex());
        for c in cubes {
            let centre: Vec<f64> = c.iter().map(|i| *i as f64 * ell).collect();
            assert!(set.contains(&centre), "{spec:?}");
        }
    }
}
