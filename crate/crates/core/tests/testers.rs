use convexity_testbed::convex::estimate::estimate_distance;
use convexity_testbed::convex::TargetSpec;
use convexity_testbed::grid::{build_grid, generate_cover, CoverMode, GridParams};
use convexity_testbed::one_sided::{verify_certificate, Decision, OneSidedConfig, OneSidedTester, Stage};
use convexity_testbed::gauss::normal_interval_mass;
use convexity_testbed::two_sided::{nearest_cover_element, proper_learn_via_cover, LearnConfig};
use proptest::prelude::*;

fn desk() -> GridParams {
    GridParams::with_overrides(2, 0.2, Some(0.5), Some(1.5), None).unwrap()
}

fn convex_target() -> impl Strategy<Value = TargetSpec> {
    prop_oneof![
        (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..2.0)
            .prop_map(|(x, y, radius)| TargetSpec::Ball { center: vec![x, y], radius }),
        (prop::collection::vec(-1.0f64..1.0, 6), prop::collection::vec(-0.5f64..1.0, 3)).prop_map(|(w, offsets)| {
            TargetSpec::Halfspaces {
                normals: w.chunks(2).map(|c| vec![c[0] + 1e-3, c[1]]).collect(),
                offsets,
            }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convex_targets_never_yield_a_proof(spec in convex_target(), seed in any::<u64>()) {
        let gp = desk();
        let grid = build_grid(&gp).unwrap();
        let t = spec.build().unwrap();
        // the default eps/4 threshold may reject on mass; such a rejection must not prove anything
        for cfg in [OneSidedConfig::new(&grid), OneSidedConfig::new(&grid).with_guarded_threshold()] {
            let guarded = cfg.threshold_overridden;
            let v = OneSidedTester::new(cfg).unwrap().run_a_star(&t, seed).unwrap();
            prop_assert!(v.stage != Stage::HullViolation);
            if let Some(c) = &v.certificate {
                prop_assert!(!verify_certificate(c, &t, &gp).proves_nonconvexity);
            }
            if guarded {
                prop_assert_eq!(v.decision, Decision::Accept);
            }
        }
    }
}

#[test]
fn starved_budget_accepts_at_the_empty_cube_step() {
    let grid = build_grid(&desk()).unwrap();
    let mut cfg = OneSidedConfig::new(&grid);
    cfg.s = 50;
    let stripe = TargetSpec::Stripe { n: 2, thresholds: 5 }.build().unwrap();
    let v = OneSidedTester::new(cfg).unwrap().run_a_star(&stripe, 1).unwrap();
    assert_eq!(v.stage, Stage::EmptyCube);
    assert_eq!(v.decision, Decision::Accept);
    assert!(v.bc_mass.is_none());
}

#[test]
fn stripe_certificates_reverify() {
    let gp = desk();
    let grid = build_grid(&gp).unwrap();
    let tester = OneSidedTester::new(OneSidedConfig::new(&grid).with_guarded_threshold()).unwrap();
    let stripe = TargetSpec::Stripe { n: 2, thresholds: 5 }.build().unwrap();
    let mut seen = 0;
    for seed in 0..20 {
        let v = tester.run_a_star(&stripe, seed).unwrap();
        if let Some(c) = &v.certificate {
            let check = verify_certificate(c, &stripe, &gp);
            assert!(check.verified && check.proves_nonconvexity, "{check:?}");
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn realizable_learning_on_the_line() {
    let gp = GridParams::with_overrides(1, 0.1, Some(0.5), Some(2.0), None).unwrap();
    let cover = generate_cover(&build_grid(&gp).unwrap(), 1 << 20, CoverMode::Full).unwrap();
    for (k, idx) in [3usize, 40, 100, 153].into_iter().enumerate() {
        let target = cover[idx].build().unwrap();
        let r = proper_learn_via_cover(&target, &LearnConfig::new(0.1, 0.1), &gp, k as u64).unwrap();
        let d = estimate_distance(&r.hypothesis.build().unwrap(), &target, 50_000, 9).unwrap();
        assert!(d.estimate <= 0.1, "element {idx}: {d:?}");
    }
}

#[test]
fn chaining_bound_for_nearest_cover_element() {
    // S is a cover element, so dist(S, C') = 0 with C' = S; H widens S by a
    // margin chosen so dist(H, S) <= eps / 5 exactly. The chosen C* must then
    // sit within 4 eps / 5 of H.
    let gp = GridParams::with_overrides(1, 0.1, Some(0.5), Some(2.0), None).unwrap();
    let cover = generate_cover(&build_grid(&gp).unwrap(), 1 << 20, CoverMode::Full).unwrap();
    let built: Vec<_> = cover.iter().map(|c| c.build().unwrap()).collect();
    let eps = 0.1;
    for (k, (lo, hi)) in [(-1i64, 2i64), (0, 0), (-4, 1), (2, 6)].into_iter().enumerate() {
        let (a, b) = (lo as f64 * 0.5 - 0.25, hi as f64 * 0.5 + 0.25);
        let margin = 0.02;
        let extra = normal_interval_mass(a - margin, a) + normal_interval_mass(b, b + margin);
        assert!(extra <= eps / 5.0);
        let h = TargetSpec::PointHull { n: 1, points: vec![vec![a - margin], vec![b + margin]] }.build().unwrap();
        let (best, _) = nearest_cover_element(&h, &built, 200_000, k as u64);
        let TargetSpec::CubeHull { cubes, .. } = &cover[best] else { panic!() };
        let (c_lo, c_hi) = match (cubes.iter().map(|c| c[0]).min(), cubes.iter().map(|c| c[0]).max()) {
            (Some(l), Some(u)) => (l as f64 * 0.5 - 0.25, u as f64 * 0.5 + 0.25),
            _ => (0.0, 0.0),
        };
        // exact symmetric difference of two intervals
        let (ha, hb) = (a - margin, b + margin);
        let (l, u) = (ha.max(c_lo), hb.min(c_hi));
        let inter = if l < u { normal_interval_mass(l, u) } else { 0.0 };
        let d = normal_interval_mass(ha, hb) + normal_interval_mass(c_lo, c_hi) - 2.0 * inter;
        assert!(d <= 4.0 * eps / 5.0, "cubes {lo}..{hi}: chose {cubes:?}, distance {d}");
    }
}
