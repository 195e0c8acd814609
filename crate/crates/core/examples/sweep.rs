//! A seeded sweep over dimension through the experiment harness.

use convexity_testbed::harness::{sweep, sweep_table, Command, ExperimentConfig};
use serde_json::json;

fn main() -> convexity_testbed::Result<()> {
    let base = ExperimentConfig::new(Command::Shatter, 42)
        .with("m", 20)
        .with("trials", 500);
    let values: Vec<_> = (2..=8).map(|n| json!(n)).collect();
    let cells = sweep(&base, "n", &values, 4)?;
    let csv = sweep_table("n", &cells).to_csv()?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
