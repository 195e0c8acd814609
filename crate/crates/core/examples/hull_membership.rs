//! Exact-fallback LP hull membership on a few planar queries.

use convexity_testbed::convex::{solve_hull, LP_TOL};

fn main() -> convexity_testbed::Result<()> {
    let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    for q in [[0.5, 0.5], [1.0, 0.25], [1.0 + 1e-9, 0.5], [1.5, 0.5]] {
        let s = solve_hull(&q, &square, LP_TOL)?;
        println!(
            "{q:?}: member = {}, residual = {:.2e}, exact = {}, support = {:?}",
            s.member, s.residual, s.exact, s.support
        );
    }
    Ok(())
}
