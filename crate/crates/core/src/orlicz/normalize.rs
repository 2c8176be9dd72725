use serde::{Deserialize, Serialize};

use super::{Branch, OrliczFunction, Piece};
use crate::error::{Error, Result};
use crate::roots;

/// How the linear continuation point is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeMode {
    /// Continue linearly from the point where `∫₀^t x dM'(x)` reaches 1.
    #[default]
    Default,
    /// Continue linearly from `M⁻¹(1)`, with the slope jump there carrying the
    /// rest of the normalization mass.
    Strict,
}

/// `∫_{[0,t)} x dM'(x) = t·M'(t⁻) − M(t)`.
fn mass_below(m: &OrliczFunction, t: f64) -> f64 {
    t * m.deriv_left(1, t) - m.eval(t)
}

/// Replaces `M` beyond a point `t₁` by the line `σt − 1` through `(t₁, M(t₁))`,
/// which makes `∫₀^∞ x dM'(x) = 1` exactly.
pub fn normalize_by_linearization(m: &OrliczFunction, mode: NormalizeMode) -> Result<OrliczFunction> {
    if m.is_normalized() && m.has_linear_tail() && mode == NormalizeMode::Default {
        return Ok(m.clone());
    }
    let t1 = match mode {
        NormalizeMode::Default => roots::solve_increasing(|t| mass_below(m, t), 1.0, 1e300)
            .map_err(|_| Error::NotNormalizable("∫₀^t x dM'(x) stays below 1".into()))?,
        NormalizeMode::Strict => {
            let t1 = m.inverse(1.0)?;
            let mass = mass_below(m, t1);
            if mass > 1.0 + 1e-12 {
                return Err(Error::NotNormalizable(format!(
                    "∫ x dM'(x) over [0, M⁻¹(1)) is already {mass} > 1"
                )));
            }
            t1
        }
    };
    let slope = (1.0 + m.eval(t1)) / t1;
    let mut pieces: Vec<Piece> = m
        .pieces()
        .iter()
        .filter(|p| p.domain.lo < t1)
        .cloned()
        .collect();
    pieces.last_mut().unwrap().domain.hi = t1;
    pieces.push(Piece::new(t1, f64::INFINITY, Branch::Affine {
        slope,
        intercept: -1.0,
    }));
    OrliczFunction::from_pieces(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_kink_location() {
        for p in [1.5, 2.0, 3.0, 4.5] {
            let m = normalize_by_linearization(&OrliczFunction::power(p).unwrap(), NormalizeMode::Default).unwrap();
            let expected = (p - 1.0f64).powf(-1.0 / p);
            assert!((m.kink().unwrap() - expected).abs() < 1e-13 * expected, "p = {p}");
            assert!((m.normalization_integral() - 1.0).abs() < 1e-13);
            assert!(m.is_normalized() && m.has_linear_tail());
        }
    }

    #[test]
    fn strict_mode_tail_starts_at_unit_level() {
        let m = normalize_by_linearization(&OrliczFunction::power(1.5).unwrap(), NormalizeMode::Strict).unwrap();
        let t1 = m.kink().unwrap();
        assert!((m.eval(t1) - 1.0).abs() < 1e-13);
        assert!((m.normalization_integral() - 1.0).abs() < 1e-13);
        // The slope jump at the kink is an atom of dM'.
        assert!(m.deriv(1, t1) > m.deriv_left(1, t1));
    }

    #[test]
    fn strict_mode_rejects_when_mass_exceeds_one() {
        // 0.01 t^8 carries mass 7 below M⁻¹(1).
        let m = OrliczFunction::scaled_power(0.01, 8.0).unwrap();
        assert!(normalize_by_linearization(&m, NormalizeMode::Strict).is_err());
    }

    #[test]
    fn linear_function_is_not_normalizable() {
        let m = OrliczFunction::power(1.0).unwrap();
        assert!(matches!(
            normalize_by_linearization(&m, NormalizeMode::Default),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn already_normalized_is_unchanged() {
        let m = OrliczFunction::shifted_linear(1.0).unwrap();
        assert_eq!(normalize_by_linearization(&m, NormalizeMode::Default).unwrap(), m);
    }
}
