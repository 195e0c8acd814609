//! Frequency with which Gaussian points sit in convex position.

use convexity_testbed::adversarial::shattering_experiment;

fn main() -> convexity_testbed::Result<()> {
    for n in 2..=8 {
        let rep = shattering_experiment(n, 20, 1000, n as u64)?;
        println!("n = {n}, M = 20: frequency {:.3} +- {:.3}", rep.frequency, rep.std_error);
    }
    Ok(())
}
