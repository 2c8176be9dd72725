//! Bracketing and bisection for monotone problems.

use crate::error::{Error, Result};

/// Finds the boundary of a monotone predicate on `(lo, hi]`.
///
/// Requires `pred(hi)` to hold; returns the smallest point (up to `rel_tol`)
/// at which `pred` holds. `pred` must be false-then-true along the interval.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut lo: f64, mut hi: f64, rel_tol: f64, mut pred: P) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi.abs() {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Doubles `start` until `pred` holds, giving up past `limit`.
pub fn expand_upper<P: FnMut(f64) -> bool>(start: f64, limit: f64, mut pred: P) -> Result<f64> {
    let mut hi = start;
    while !pred(hi) {
        hi *= 2.0;
        if hi > limit || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "no bracket found below {limit}"
            )));
        }
    }
    Ok(hi)
}

/// Solves `g(t) = target` for nondecreasing `g` on `[0, ∞)`, returning the smallest root.
pub fn solve_increasing<G: FnMut(f64) -> f64>(mut g: G, target: f64, limit: f64) -> Result<f64> {
    let hi = expand_upper(1.0, limit, |t| g(t) >= target)?;
    let lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
    Ok(bisect_predicate(lo, hi, 1e-15, |t| g(t) >= target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = solve_increasing(|t| t * t, 2.0, 1e10).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn small_root_below_one() {
        let r = solve_increasing(|t| t.powi(3), 1e-9, 1e10).unwrap();
        assert!((r - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn unbounded_fails() {
        assert!(solve_increasing(|t| 1.0 - 1.0 / (1.0 + t), 2.0, 1e12).is_err());
    }
}
