use serde::{Deserialize, Serialize};

use super::{log_grid, OrliczFunction};
use crate::error::{Error, Result};

/// Constants `(a, b)` with `a⁻¹M(b⁻¹t) ≤ N(t) ≤ aM(bt)` on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConstants {
    pub a: f64,
    pub b: f64,
}

const SLACK: f64 = 1e-12;

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Smallest `a` that works for a given `b`.
fn needed_a(m: &OrliczFunction, n: &OrliczFunction, b: f64, grid: &[f64]) -> f64 {
    grid.iter().fold(1.0f64, |acc, &t| {
        let nt = n.eval(t);
        acc.max(ratio(nt, m.eval(b * t))).max(ratio(m.eval(t / b), nt))
    })
}

/// Whether `(a, b)` satisfies both inequalities at every grid point.
pub fn check_equivalence(m: &OrliczFunction, n: &OrliczFunction, a: f64, b: f64, grid: &[f64]) -> bool {
    grid.iter().all(|&t| {
        let nt = n.eval(t);
        m.eval(t / b) / a <= nt * (1.0 + SLACK) && nt <= a * m.eval(b * t) * (1.0 + SLACK)
    })
}

/// Searches `b` over a log grid in `[1, 10⁴]` and returns the pair minimizing `max(a, b)`.
pub fn equivalence_constants(m: &OrliczFunction, n: &OrliczFunction, grid: &[f64]) -> Result<EquivalenceConstants> {
    let mut best: Option<EquivalenceConstants> = None;
    for b in log_grid(1.0, 1e4, 161) {
        let a = needed_a(m, n, b, grid);
        if a.is_finite() && best.is_none_or(|c| a.max(b) < c.a.max(c.b)) {
            best = Some(EquivalenceConstants { a, b });
        }
    }
    match best {
        Some(c) if c.a <= 1e12 => Ok(c),
        Some(c) => Err(Error::NotEquivalent(format!("best constant a = {} at b = {}", c.a, c.b))),
        None => Err(Error::NotEquivalent("ratio unbounded for every b in [1, 1e4]".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_functions() {
        let m = OrliczFunction::power(2.5).unwrap();
        let grid = log_grid(1e-3, 10.0, 100);
        assert_eq!(equivalence_constants(&m, &m, &grid).unwrap(), EquivalenceConstants { a: 1.0, b: 1.0 });
    }

    #[test]
    fn doubled_function() {
        let m = OrliczFunction::power(2.0).unwrap();
        let n = m.scale_values(2.0).unwrap();
        let grid = log_grid(1e-3, 10.0, 100);
        assert!(check_equivalence(&m, &n, 2.0, 1.0, &grid));
        assert!(!check_equivalence(&m, &n, 1.5, 1.0, &grid));
        let c = equivalence_constants(&m, &n, &grid).unwrap();
        assert!(check_equivalence(&m, &n, c.a, c.b, &grid));
        assert!(c.a.max(c.b) <= 2.0);
    }

    #[test]
    fn different_powers_are_not_equivalent_on_wide_grid() {
        let m = OrliczFunction::power(2.0).unwrap();
        let n = OrliczFunction::power(4.0).unwrap();
        let grid = log_grid(1e-12, 1e12, 200);
        assert!(equivalence_constants(&m, &n, &grid).is_err());
    }
}
