//! Grid-backed branch: cubic Hermite interpolation of sampled values and slopes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Samples `(t_i, M(t_i), M'(t_i))` on an increasing positive grid.
///
/// Inside the grid the function is the C¹ cubic Hermite interpolant. Below the
/// first node it is continued as a pure power `m₀ (t/t₀)^β` with the local
/// exponent `β = t₀ m'₀ / m₀`; above the last node it is continued linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteTable {
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    pub dm: Vec<f64>,
}

impl HermiteTable {
    pub fn new(t: Vec<f64>, m: Vec<f64>, dm: Vec<f64>) -> Result<Self> {
        let table = Self { t, m, dm };
        table.validate()?;
        Ok(table)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.t.len() < 2 || self.t.len() != self.m.len() || self.t.len() != self.dm.len() {
            return invalid("table needs at least two nodes and equal-length columns");
        }
        if !(self.t[0] > 0.0) {
            return invalid("table nodes must be positive");
        }
        if self.t.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("table nodes must be strictly increasing");
        }
        if self.m.iter().chain(&self.dm).any(|v| !v.is_finite()) {
            return invalid("table values must be finite");
        }
        Ok(())
    }

    fn head_exponent(&self) -> f64 {
        if self.m[0] > 0.0 {
            self.t[0] * self.dm[0] / self.m[0]
        } else {
            0.0
        }
    }

    /// k-th derivative (k ≤ 3) at `t`.
    pub fn deriv(&self, k: u32, t: f64) -> f64 {
        let n = self.t.len();
        let (t0, tn) = (self.t[0], self.t[n - 1]);
        if t < t0 {
            let m0 = self.m[0];
            if m0 <= 0.0 {
                return 0.0;
            }
            let beta = self.head_exponent();
            let mut c = m0 * t0.powf(-beta);
            for i in 0..k {
                c *= beta - i as f64;
            }
            if c == 0.0 {
                return 0.0;
            }
            return c * t.powf(beta - k as f64);
        }
        if t >= tn {
            return match k {
                0 => self.m[n - 1] + self.dm[n - 1] * (t - tn),
                1 => self.dm[n - 1],
                _ => 0.0,
            };
        }
        let i = match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let u = (t - self.t[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (d0, d1) = (self.dm[i] * h, self.dm[i + 1] * h);
        let (u2, u3) = (u * u, u * u * u);
        match k {
            0 => {
                m0 * (2.0 * u3 - 3.0 * u2 + 1.0)
                    + d0 * (u3 - 2.0 * u2 + u)
                    + m1 * (-2.0 * u3 + 3.0 * u2)
                    + d1 * (u3 - u2)
            }
            1 => {
                (m0 * (6.0 * u2 - 6.0 * u)
                    + d0 * (3.0 * u2 - 4.0 * u + 1.0)
                    + m1 * (-6.0 * u2 + 6.0 * u)
                    + d1 * (3.0 * u2 - 2.0 * u))
                    / h
            }
            2 => {
                (m0 * (12.0 * u - 6.0) + d0 * (6.0 * u - 4.0) + m1 * (6.0 - 12.0 * u) + d1 * (6.0 * u - 2.0))
                    / (h * h)
            }
            3 => (12.0 * m0 + 6.0 * d0 - 12.0 * m1 + 6.0 * d1) / (h * h * h),
            _ => 0.0,
        }
    }

    pub fn last_node(&self) -> (f64, f64, f64) {
        let n = self.t.len() - 1;
        (self.t[n], self.m[n], self.dm[n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        let f = |t: f64| t * t * t + t;
        let df = |t: f64| 3.0 * t * t + 1.0;
        let t: Vec<f64> = (1..=20).map(|i| i as f64 * 0.1).collect();
        let table = HermiteTable::new(t.clone(), t.iter().map(|&x| f(x)).collect(), t.iter().map(|&x| df(x)).collect()).unwrap();
        for x in [0.15, 0.77, 1.234, 1.99] {
            assert!((table.deriv(0, x) - f(x)).abs() < 1e-13);
            assert!((table.deriv(1, x) - df(x)).abs() < 1e-12);
            assert!((table.deriv(2, x) - 6.0 * x).abs() < 1e-10);
        }
    }

    #[test]
    fn extrapolates_power_head_and_linear_tail() {
        let t = vec![1.0, 2.0];
        let table = HermiteTable::new(t, vec![1.0, 4.0], vec![2.0, 4.0]).unwrap();
        assert!((table.deriv(0, 0.5) - 0.25).abs() < 1e-15);
        assert!((table.deriv(1, 0.5) - 1.0).abs() < 1e-15);
        assert!((table.deriv(0, 3.0) - 8.0).abs() < 1e-15);
        assert_eq!(table.deriv(2, 3.0), 0.0);
    }
}
