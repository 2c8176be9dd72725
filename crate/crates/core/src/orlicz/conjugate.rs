use super::OrliczFunction;
use crate::roots;

/// Convex conjugate `M*(s) = sup_{t≥0} (st − M(t))`.
///
/// Not an Orlicz function in general: it is `+∞` past the largest slope of `M`.
#[derive(Clone, Debug)]
pub struct Conjugate {
    m: OrliczFunction,
}

pub fn conjugate(m: &OrliczFunction) -> Conjugate {
    Conjugate { m: m.clone() }
}

impl Conjugate {
    /// Maximizer of `t ↦ st − M(t)`: the first `t` with `M'(t⁺) ≥ s`, or `None`
    /// when the slope of `M` never reaches `s`.
    pub fn maximizer(&self, s: f64) -> Option<f64> {
        if s <= self.m.deriv(1, 0.0) {
            return Some(0.0);
        }
        if let Some(slope) = self.m.tail_slope() {
            if s > slope {
                return None;
            }
        }
        let reaches = |t: f64| self.m.deriv(1, t) >= s;
        let hi = roots::expand_upper(1.0, 1e300, reaches).ok()?;
        let lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
        Some(roots::bisect_predicate(lo, hi, 1e-15, reaches))
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self.maximizer(s) {
            Some(t) => (s * t - self.m.eval(t)).max(0.0),
            None => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_square_is_self_conjugate() {
        let m = OrliczFunction::scaled_power(0.5, 2.0).unwrap();
        let c = conjugate(&m);
        for s in [0.01, 0.3, 1.0, 4.0, 50.0] {
            assert!((c.eval(s) - 0.5 * s * s).abs() < 1e-12 * s * s, "s = {s}");
        }
    }

    #[test]
    fn young_pairs() {
        for p in [1.5, 3.0, 6.0] {
            let m = OrliczFunction::scaled_power(1.0 / p, p).unwrap();
            let c = conjugate(&m);
            let ps = p / (p - 1.0);
            for s in [0.2f64, 1.0, 3.0] {
                let expected = s.powf(ps) / ps;
                assert!((c.eval(s) - expected).abs() < 1e-11 * expected.max(1.0), "p = {p}, s = {s}");
            }
        }
    }

    #[test]
    fn infinite_past_tail_slope() {
        let m = OrliczFunction::shifted_linear(1.0).unwrap();
        let c = conjugate(&m);
        assert_eq!(c.eval(1.5), f64::INFINITY);
        assert!((c.eval(1.0) - 1.0).abs() < 1e-15);
        assert!((c.eval(0.5) - 0.5).abs() < 1e-15);
    }
}
