//! Draws from the random-polytope and random-shell distributions, and the
//! marginal identity linking them.

use convexity_testbed::adversarial::{build_shells, marginal_identity, sample_dno, sample_dyes};
use convexity_testbed::gauss::LowerBoundParams;

fn main() -> convexity_testbed::Result<()> {
    let p = LowerBoundParams::with_overrides(8, Some(16), None, None)?;
    let poly = sample_dyes(8, p.halfspaces, p.r, 1)?;
    let origin_in = poly.contains(&[0.0; 8]);
    println!("polytope with {} faces at r = {:.4}; origin inside: {origin_in}", poly.normals.len(), poly.r);

    let shells = build_shells(8, 64)?;
    let rho = p.rho();
    let part = sample_dno(&shells, |t| rho.eval(t), 2);
    let kept = part.included.iter().filter(|b| **b).count();
    println!("shell union keeps {kept} of 64 shells; convex: {}", part.is_convex());

    let radii: Vec<f64> = (0..5).map(|i| 0.5 * p.r + i as f64 * (2.0 * p.alpha - 0.5 * p.r) / 4.0).collect();
    for m in marginal_identity(&p, &radii, 10_000, 3) {
        println!(
            "radius {:.3}: rho {:.4}, frequency {:.4}, within 4 sigma: {}",
            m.radius,
            m.rho,
            m.frequency,
            m.within(4.0)
        );
    }
    Ok(())
}
