//! Learn-then-test on the line with a 17-cube grid.

use convexity_testbed::convex::TargetSpec;
use convexity_testbed::grid::GridParams;
use convexity_testbed::two_sided::{ggr_test, TwoSidedConfig};

fn main() -> convexity_testbed::Result<()> {
    let gp = GridParams::with_overrides(1, 0.1, Some(0.5), Some(2.0), None)?;
    let cfg = TwoSidedConfig::new(0.2, 0.1);
    let targets = [
        ("interval", TargetSpec::CubeHull { n: 1, ell: 0.5, cubes: vec![vec![-1], vec![2]] }),
        ("stripe", TargetSpec::Stripe { n: 1, thresholds: 5 }),
    ];
    for (name, spec) in targets {
        let v = ggr_test(&spec.build()?, &cfg, &gp, 5)?;
        println!(
            "{name}: {:?}, disagreement {:.3} vs threshold {:.3}, {} candidates, {} + {} samples",
            v.decision, v.disagreement, v.threshold, v.learn.candidates_scored, v.learn.learn_samples, v.test_samples
        );
    }
    Ok(())
}
