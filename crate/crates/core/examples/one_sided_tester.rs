//! The one-sided tester at desk scale: a convex ball and a non-convex stripe.

use convexity_testbed::convex::TargetSpec;
use convexity_testbed::grid::{build_grid, GridParams};
use convexity_testbed::one_sided::{verify_certificate, OneSidedConfig, OneSidedTester};

fn main() -> convexity_testbed::Result<()> {
    let gp = GridParams::with_overrides(2, 0.2, Some(0.5), Some(1.5), None)?;
    let grid = build_grid(&gp)?;
    let config = OneSidedConfig::new(&grid).with_guarded_threshold();
    println!(
        "{} cubes, s = {}, runs = {}, threshold = {:.3}",
        grid.len(),
        config.s,
        config.runs,
        config.reject_threshold
    );
    let tester = OneSidedTester::new(config)?;

    let targets = [
        ("ball", TargetSpec::Ball { center: vec![0.2, -0.1], radius: 1.0 }),
        ("stripe", TargetSpec::Stripe { n: 2, thresholds: 5 }),
    ];
    for (name, spec) in targets {
        let t = spec.build()?;
        let v = tester.run_a_prime(&t, 11)?;
        print!("{name}: {:?} at {:?}", v.decision, v.stage);
        if let Some(c) = &v.certificate {
            let check = verify_certificate(c, &t, &gp);
            print!(", certificate verified = {}, proves non-convexity = {}", check.verified, check.proves_nonconvexity);
        }
        println!();
    }
    Ok(())
}
