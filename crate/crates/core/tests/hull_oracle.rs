mod common;

use common::{caratheodory_member, hull_instance, Lcg};
use convexity_testbed::convex::{solve_hull, LP_TOL};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn generators() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(point(n), 1..=8)))
}

proptest! {
    #[test]
    fn every_generator_is_a_member((_n, gens) in generators(), pick in any::<prop::sample::Index>()) {
        let g = pick.get(&gens).clone();
        prop_assert!(solve_hull(&g, &gens, LP_TOL).unwrap().member);
    }

    #[test]
    fn adding_generators_keeps_membership(
        (n, gens) in generators(),
        extra in prop::collection::vec(point(3), 1..4),
        weights in prop::collection::vec(0.0f64..1.0, 8),
    ) {
        let s: f64 = weights[..gens.len()].iter().sum::<f64>().max(1e-12);
        let q: Vec<f64> = (0..n)
            .map(|j| gens.iter().zip(&weights).map(|(g, w)| g[j] * w / s).sum())
            .collect();
        let before = solve_hull(&q, &gens, LP_TOL).unwrap().member;
        let mut more = gens.clone();
        more.extend(extra.into_iter().map(|mut e| { e.truncate(n); e }));
        let after = solve_hull(&q, &more, LP_TOL).unwrap().member;
        prop_assert!(!before || after);
    }

    #[test]
    fn support_weights_reconstruct_members((n, gens) in generators(), q in point(3)) {
        let q = &q[..n];
        let s = solve_hull(q, &gens, LP_TOL).unwrap();
        if s.member {
            let total: f64 = s.support.iter().map(|(_, w)| w).sum();
            prop_assert!((total - 1.0).abs() < 1e-6);
            for j in 0..n {
                let x: f64 = s.support.iter().map(|(i, w)| gens[*i][j] * w).sum();
                prop_assert!((x - q[j]).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn agrees_with_caratheodory_brute_force() {
    let mut rng = Lcg(0xC0FFEE);
    for k in 0..2000 {
        let (q, gens) = hull_instance(&mut rng);
        let lp = solve_hull(&q, &gens, LP_TOL).unwrap().member;
        let brute = caratheodory_member(&q, &gens, 1e-9);
        assert_eq!(lp, brute, "instance {k}: q = {q:?}, gens = {gens:?}");
    }
}

#[test]
fn degenerate_generator_sets() {
    let line = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 1.0]];
    for (q, want) in [([0.5, 0.5], true), ([2.0, 2.0], true), ([1.0, 1.1], false), ([2.5, 2.5], false)] {
        assert_eq!(solve_hull(&q, &line, LP_TOL).unwrap().member, want, "{q:?}");
        assert_eq!(caratheodory_member(&q, &line, 1e-9), want, "{q:?}");
    }
}
