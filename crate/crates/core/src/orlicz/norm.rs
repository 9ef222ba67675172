use crate::error::{domain, Result};
use crate::math::max_abs;

use super::{OrliczFunction, YoungFunction};

/// Relative width at which the Luxemburg bisection stops.
pub const LUXEMBURG_REL_TOL: f64 = 1e-10;
/// Hard cap on bisection steps.
pub const LUXEMBURG_MAX_ITER: usize = 200;

/// Luxemburg norm `inf{ρ > 0 : Σ f(|x_i|/ρ) ≤ 1}`.
///
/// Bisection runs on the bracket `[‖x‖_∞ / f⁻¹(1), ‖x‖_∞ / f⁻¹(1/n)]`. When the
/// lower end is already feasible (which happens for functions with a bounded
/// domain) it is the answer.
pub fn luxemburg_norm<F: YoungFunction + ?Sized>(f: &F, x: &[f64]) -> Result<f64> {
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(domain!("vector entries must be finite, found {bad}"));
    }
    let m = max_abs(x);
    if m == 0.0 {
        return Ok(0.0);
    }
    let n = x.len() as f64;
    let modular = |rho: f64| -> f64 { x.iter().map(|v| f.value(v.abs() / rho)).sum() };

    let mut lo = m / f.inverse_saturating(1.0);
    let mut hi = m / f.inverse_saturating(1.0 / n);
    if modular(lo) <= 1.0 {
        return Ok(lo);
    }
    // f(f⁻¹(1/n)) can round above 1/n
    while modular(hi) > 1.0 {
        hi *= 1.0 + 1e-12;
    }
    for _ in 0..LUXEMBURG_MAX_ITER {
        if hi - lo <= LUXEMBURG_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(min, max)` over the grid of `f⁻¹(t) / g⁻¹(t)`.
pub fn equivalence_constants(
    f: &OrliczFunction,
    g: &OrliczFunction,
    grid: &[f64],
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(domain!("equivalence grid is empty"));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &t in grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(domain!("grid points must be positive, found {t}"));
        }
        let ratio = f.inverse(t)? / g.inverse(t)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::Tail;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn power_norm_is_p_norm() {
        let x = [3.0, -4.0, 1.0];
        for &p in &[1.0, 1.3, 2.0, 3.0] {
            let f = OrliczFunction::power(p).unwrap();
            let exact = crate::math::p_norm(x.iter().copied(), p);
            let got = luxemburg_norm(&f, &x).unwrap();
            assert!((got - exact).abs() <= 1e-9 * exact, "p={p}: {got} vs {exact}");
        }
    }

    #[test]
    fn single_coordinate_closed_form() {
        let f = OrliczFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5)], Tail::Slope(2.0)).unwrap();
        // f(1/ρ) = 1 ⇔ 1/ρ = 1.25
        let got = luxemburg_norm(&f, &[1.0, 0.0, 0.0]).unwrap();
        assert!((got - 0.8).abs() < 1e-10);
        let scaled = luxemburg_norm(&f, &[-2.5]).unwrap();
        assert!((scaled - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_and_non_finite() {
        let f = OrliczFunction::power(2.0).unwrap();
        assert_eq!(luxemburg_norm(&f, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(luxemburg_norm(&f, &[]).unwrap(), 0.0);
        assert!(luxemburg_norm(&f, &[1.0, f64::NAN]).is_err());
        assert!(luxemburg_norm(&f, &[f64::INFINITY]).is_err());
    }

    #[test]
    fn bounded_domain_gives_sup_norm() {
        // 0 on [0, 1/c], +∞ after: ‖x‖ = c ‖x‖_∞
        let f = OrliczFunction::piecewise(vec![(0.0, 0.0), (0.5, 0.0)], Tail::Bounded).unwrap();
        let got = luxemburg_norm(&f, &[1.0, -3.0, 2.0]).unwrap();
        assert_eq!(got, 6.0);
    }

    #[test]
    fn equivalence_examples() {
        let sq = OrliczFunction::power(2.0).unwrap();
        let lin = OrliczFunction::power(1.0).unwrap();
        assert_eq!(equivalence_constants(&sq, &sq, &[0.5, 2.0]).unwrap(), (1.0, 1.0));
        assert_eq!(equivalence_constants(&lin, &sq, &[1.0]).unwrap(), (1.0, 1.0));
        assert!(equivalence_constants(&lin, &sq, &[]).is_err());

        // interpolant of t² on a fine grid
        let knots: Vec<(f64, f64)> = (0..=400).map(|k| {
            let t = k as f64 * 0.05;
            (t, t * t)
        }).collect();
        let g = OrliczFunction::piecewise(knots, Tail::Slope(40.0)).unwrap();
        let grid: Vec<f64> = (0..=99).map(|k| 0.1 * libm::pow(100.0, k as f64 / 99.0)).collect();
        let (a, b) = equivalence_constants(&sq, &g, &grid).unwrap();
        assert!(b / a <= 1.01, "{a} {b}");
    }
}
