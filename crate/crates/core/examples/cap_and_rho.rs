//! Cap fractions, the solved sphere radius, and the survival curve rho.

use convexity_testbed::gauss::{CapTable, LowerBoundParams};

fn main() -> convexity_testbed::Result<()> {
    let table = CapTable::new(16)?;
    for t in [0.0, 0.1, 0.25, 0.5, 0.9] {
        println!("cap({t:.2}) = {:.6e}  bound e^(-n t^2/2) = {:.6e}", table.cap(t), (-8.0 * t * t).exp());
    }

    let p = LowerBoundParams::new(16)?;
    println!(
        "n = 16: N = {}, q = {}, alpha = {:.3} (clamped: {}), r = {:.6}",
        p.halfspaces, p.queries, p.alpha, p.alpha_clamped, p.r
    );
    let rho = p.rho();
    println!("rho(alpha) = {:.12}  (1 - 1/N)^N = {:.12}", rho.eval(p.alpha), (1.0 - 1.0 / p.halfspaces as f64).powi(p.halfspaces as i32));
    for x in [0.5 * p.r, p.r, 2.0, 3.0, 4.0, 6.0] {
        println!("rho({x:.3}) = {:.6}", rho.eval(x));
    }
    Ok(())
}
