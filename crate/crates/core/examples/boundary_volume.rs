//! Thickened-boundary volume of random polytopes and the surface-area check.

use convexity_testbed::convex::lemmas::check_boundary_volume_on_polytopes;
use convexity_testbed::convex::{check_ball_theorem, TargetSpec};

fn main() -> convexity_testbed::Result<()> {
    for n in [2usize, 4] {
        let nf = n as f64;
        let rep = check_boundary_volume_on_polytopes(n, 2.0 * nf.sqrt(), 0.1 * nf.powf(-0.75), 5, 50_000, 7)?;
        println!(
            "n = {n}: max estimate {:.4} against bound {:.4}, all within: {}",
            rep.max_estimate, rep.bound, rep.all_within
        );
    }

    let halfspace = TargetSpec::Halfspaces {
        normals: vec![vec![1.0, 0.0, 0.0, 0.0]],
        offsets: vec![0.0],
    }
    .build()?;
    let c = check_ball_theorem(&halfspace, 0.01, 1_000_000, 3)?;
    println!(
        "halfspace at n = 4: ratio {:.4} +- {:.4}, bound {:.4}, 1D density at 0 = {:.4}",
        c.ratio,
        c.std_error,
        c.bound,
        1.0 / (2.0 * std::f64::consts::PI).sqrt()
    );
    Ok(())
}
