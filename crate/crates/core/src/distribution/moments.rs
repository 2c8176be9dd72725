use serde::{Deserialize, Serialize};

use super::{recip, Distribution};
use crate::error::{invalid, Result};
use crate::orlicz::Branch;
use crate::quad::{integrate, QuadOptions};

const QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-12,
    max_intervals: 4000,
};

/// Integration-by-parts form of `∫_a^b x^r f(x) dx` on one smooth branch, with
/// `f` the density generated by the branch for parameter `p`.
fn smooth_moment(branch: &Branch, p: f64, a: f64, b: f64, r: f64) -> Result<f64> {
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let w = 1.0 - r * inv_p;
    let (ya, yb) = (1.0 / a, 1.0 / b);
    let m = |k: u32, y: f64| branch.deriv(k, y);
    let tail = integrate(|y| m(0, y) * y.powf(-r - 1.0), yb, ya, &QUAD)?.value;
    Ok(inv_p * (m(2, yb) * b.powf(r - 2.0) - m(2, ya) * a.powf(r - 2.0))
        + w * (m(1, ya) * a.powf(r - 1.0) - m(1, yb) * b.powf(r - 1.0))
        + (1.0 - r) * w * (m(0, yb) * b.powf(r) - m(0, ya) * a.powf(r))
        - (1.0 - r) * r * w * tail)
}

/// `∫_{[a,b)} x^r dP` for a law generated by an Orlicz function, evaluated in
/// closed form from `M`, `M'`, `M''` branch by branch plus the atoms in `[a, b)`.
pub fn moment_integral(d: &Distribution, a: f64, b: f64, r: f64) -> Result<f64> {
    let Some((m, p)) = d.generator() else {
        return invalid("moment_integral needs a distribution generated from an Orlicz function");
    };
    if !(a > 0.0 && b >= a && b.is_finite()) {
        return invalid(format!("need 0 < a ≤ b < ∞, got a = {a}, b = {b}"));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for piece in m.pieces() {
        let lo = recip(piece.domain.hi).max(a);
        let hi = recip(piece.domain.lo).min(b);
        if hi > lo {
            sum += smooth_moment(&piece.branch, p, lo, hi, r)?;
        }
    }
    for atom in d.atoms() {
        if atom.at >= a && atom.at < b {
            sum += atom.at.powf(r) * atom.mass;
        }
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityCertificate {
    pub integrable: bool,
    /// `(b, ∫_{[0,b)} x^r dP)` along the truncation sequence.
    pub truncations: Vec<(f64, f64)>,
    pub diagnostic: String,
}

/// Decides whether `E X^r < ∞` from truncated moments at `b_k = x₀·10^k`.
///
/// The sequence is accepted when its increments settle into geometric decay
/// with ratio below `1 − 10⁻³`, or vanish past the support.
pub fn certify_q_integrability(d: &Distribution, r: f64) -> Result<IntegrabilityCertificate> {
    let (lo, hi) = d.support();
    let start = lo.max(1e-3) * 10.0;
    let mut truncations = Vec::new();
    let mut increments: Vec<f64> = Vec::new();
    let mut prev = d.expect_range(|x| x.powf(r), 0.0, start, r)?;
    truncations.push((start, prev));
    let mut b = start;
    for _ in 0..16 {
        let next = b * 10.0;
        let part = match d.generator() {
            Some(_) => moment_integral(d, b, next, r)?,
            None => d.expect_range(|x| x.powf(r), b, next, r)?,
        };
        prev += part;
        truncations.push((next, prev));
        increments.push(part);
        b = next;
        if b > hi {
            return Ok(IntegrabilityCertificate {
                integrable: true,
                truncations,
                diagnostic: "truncation passed the end of the support".into(),
            });
        }
        let n = increments.len();
        if n >= 4 {
            let ratios: Vec<f64> = (n - 3..n).map(|i| increments[i] / increments[i - 1]).collect();
            if ratios.iter().all(|&x| x >= 1.0 - 1e-3) {
                return Ok(IntegrabilityCertificate {
                    integrable: false,
                    truncations,
                    diagnostic: format!("decade increments do not decay (ratio {:.6})", ratios[2]),
                });
            }
            let rho = ratios[2];
            let spread = ratios.iter().fold(0.0f64, |acc, &x| acc.max((x - rho).abs()));
            if rho < 1.0 - 1e-3 && spread <= 1e-3 {
                let remainder = part * rho / (1.0 - rho);
                return Ok(IntegrabilityCertificate {
                    integrable: true,
                    truncations,
                    diagnostic: format!("geometric decay with ratio {rho:.6}, remainder {remainder:.3e}"),
                });
            }
        }
    }
    Ok(IntegrabilityCertificate {
        integrable: false,
        truncations,
        diagnostic: "no geometric decay within 16 decades".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{density_from_orlicz, pareto_q};
    use crate::orlicz::{normalize_by_linearization, NormalizeMode, OrliczFunction};

    #[test]
    fn zero_order_moment_is_interval_probability() {
        let m = normalize_by_linearization(&OrliczFunction::power(1.7).unwrap(), NormalizeMode::Default).unwrap();
        for p in [2.0, 3.0, f64::INFINITY] {
            let d = density_from_orlicz(&m, p).unwrap();
            for (a, b) in [(0.5, 0.9), (0.8, 3.0), (2.0, 50.0)] {
                let v = moment_integral(&d, a, b, 0.0).unwrap();
                let direct = d.survival(a) - d.survival(b);
                assert!((v - direct).abs() < 1e-12, "p={p} a={a} b={b}: {v} vs {direct}");
            }
        }
    }

    #[test]
    fn degenerate_interval() {
        let m = normalize_by_linearization(&OrliczFunction::power(2.0).unwrap(), NormalizeMode::Default).unwrap();
        let d = density_from_orlicz(&m, 2.0).unwrap();
        assert_eq!(moment_integral(&d, 1.5, 1.5, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn pareto_integrability_threshold() {
        let d = pareto_q(2.0).unwrap();
        assert!(certify_q_integrability(&d, 1.5).unwrap().integrable);
        assert!(!certify_q_integrability(&d, 2.0).unwrap().integrable);
    }

    #[test]
    fn generated_law_is_q_integrable() {
        let m = normalize_by_linearization(&OrliczFunction::power(1.7).unwrap(), NormalizeMode::Default).unwrap();
        let d = density_from_orlicz(&m, 2.0).unwrap();
        assert!(certify_q_integrability(&d, 1.5).unwrap().integrable);
    }
}
