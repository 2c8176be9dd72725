use super::OrliczFunction;
use crate::error::{invalid, Result};
use crate::roots::bisect_predicate;

/// Luxemburg norm `inf{t > 0 : Σ M(|x_i|/t) ≤ 1}`.
///
/// The root is bracketed by `‖x‖_∞ / M⁻¹(1)` from below and, by convexity and
/// `M(0) = 0`, by `‖x‖₁ / M⁻¹(1)` from above, then found by bisection.
pub fn luxemburg_norm(m: &OrliczFunction, x: &[f64]) -> Result<f64> {
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("vector has non-finite entries");
    }
    let sup = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if sup == 0.0 {
        return Ok(0.0);
    }
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let unit = m.inverse(1.0)?;
    let fits = |t: f64| x.iter().map(|v| m.eval(v.abs() / t)).sum::<f64>() <= 1.0;
    let lo = sup / unit;
    if fits(lo) {
        return Ok(bisect_predicate(0.5 * lo, lo, 1e-15, fits));
    }
    // Convexity guarantees the upper bound up to rounding.
    let mut hi = (l1 / unit).max(lo);
    while !fits(hi) {
        hi *= 1.0 + 1e-12;
    }
    Ok(bisect_predicate(lo, hi, 1e-15, fits))
}

/// `‖x‖_p` for `p ∈ [1, ∞]`, scaled to avoid overflow.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let sup = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if sup == 0.0 || p.is_infinite() {
        return sup;
    }
    sup * x.iter().map(|v| (v.abs() / sup).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖(‖row_i‖_M)_i‖_q`.
pub fn nested_norm<'a, I>(m: &OrliczFunction, rows: I, q: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let inner = rows
        .into_iter()
        .map(|row| luxemburg_norm(m, row))
        .collect::<Result<Vec<_>>>()?;
    Ok(lp_norm(&inner, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_and_l2_cases() {
        let id = OrliczFunction::power(1.0).unwrap();
        assert!((luxemburg_norm(&id, &[1.0, 2.0, 3.0]).unwrap() - 6.0).abs() < 1e-12);
        let sq = OrliczFunction::power(2.0).unwrap();
        assert!((luxemburg_norm(&sq, &[3.0, -4.0]).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_coordinate() {
        let m = OrliczFunction::scaled_power(0.25, 3.0).unwrap();
        let unit = m.inverse(1.0).unwrap();
        let v = luxemburg_norm(&m, &[0.0, -2.5, 0.0]).unwrap();
        assert!((v - 2.5 / unit).abs() < 1e-12 * v);
    }

    #[test]
    fn zero_and_nonfinite() {
        let m = OrliczFunction::power(2.0).unwrap();
        assert_eq!(luxemburg_norm(&m, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(luxemburg_norm(&m, &[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn linear_tail_function() {
        let m = OrliczFunction::shifted_linear(1.0).unwrap();
        // Σ (|x_i|/t - 1)₊ = 1 with x = (3, 3): 2(3/t - 1) = 1 → t = 2.
        assert!((luxemburg_norm(&m, &[3.0, 3.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_matches_definition() {
        assert!((lp_norm(&[3.0, 4.0], 2.0) - 5.0).abs() < 1e-15);
        assert_eq!(lp_norm(&[1.0, -7.0], f64::INFINITY), 7.0);
        assert!((lp_norm(&[1e200, 1e200], 2.0) - 2f64.sqrt() * 1e200).abs() < 1e186);
    }
}
