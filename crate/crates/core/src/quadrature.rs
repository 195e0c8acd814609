//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;
const PANELS: usize = 16;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into a fixed number of panels so that sharply
/// peaked integrands are not missed by the coarsest Simpson estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b == a {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let h = (b - a) / PANELS as f64;
    let panel_tol = tol / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == PANELS { b } else { a + h * (i + 1) as f64 };
            let (flo, fhi) = (f(lo), f(hi));
            let mid = 0.5 * (lo + hi);
            let fmid = f(mid);
            let whole = simpson(lo, hi, flo, fmid, fhi);
            recurse(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-10), 0.0);
        let v = integrate(|x| x.cos(), std::f64::consts::PI, 0.0, 1e-12);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn peaked_gaussian() {
        let s = 0.01;
        let v = integrate(
            |x| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp(),
            0.0,
            1.0,
            1e-13,
        );
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }
}
