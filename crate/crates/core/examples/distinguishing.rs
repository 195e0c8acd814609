//! Total variation between polytope labels and the product law.

use convexity_testbed::adversarial::{distinguishing_experiment, DistinguishConfig};

fn main() -> convexity_testbed::Result<()> {
    let mut antipodal = DistinguishConfig::new(3, 2, 1, 20_000, 5);
    antipodal.r = Some(1.0);
    antipodal.points = Some(vec![vec![4.0, 0.0, 0.0], vec![-4.0, 0.0, 0.0]]);
    let rep = distinguishing_experiment(&antipodal)?;
    println!(
        "one halfspace, antipodal pair: tv {:.4} (exact 0.28125), null floor {:.4}",
        rep.tv, rep.null_floor
    );

    let scaled = DistinguishConfig::new(16, 4, 16, 20_000, 9);
    let rep = distinguishing_experiment(&scaled)?;
    println!(
        "n = 16, N = 16, q = 4: tv {:.4} in [{:.4}, {:.4}], null floor {:.4}, typical found: {}",
        rep.tv, rep.tv_ci.0, rep.tv_ci.1, rep.null_floor, rep.typical_found
    );
    Ok(())
}
