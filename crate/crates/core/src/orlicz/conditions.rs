//! Grid-certified growth conditions relative to an exponent `q`.

use serde::{Deserialize, Serialize};

use super::{conjugate, log_grid, OrliczFunction};
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    Integral,
    Pointwise,
    Dual,
}

/// Log-spaced evaluation grid `[s_top·10^(−decades), s_top]`, `s_top = M⁻¹(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub decades: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 512,
            decades: 8.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self, m: &OrliczFunction) -> Result<Vec<f64>> {
        if self.points < 2 || !(self.decades > 0.0) {
            return invalid("grid needs at least two points and a positive span");
        }
        let top = m.inverse(1.0)?;
        Ok(log_grid(top * 10f64.powf(-self.decades), top, self.points))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub q: f64,
    pub grid: Vec<f64>,
    /// `C` for the integral condition, `γ` for the pointwise and dual ones.
    pub constant: f64,
    /// Contraction factor of the pointwise condition.
    pub c: Option<f64>,
    pub pass: bool,
    /// Grid point where the constraint ratio is largest.
    pub argmax: Option<f64>,
    pub diagnostic: Option<String>,
}

fn tight() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_intervals: 2000,
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 1.0) || !q.is_finite() {
        return invalid(format!("exponent q must lie in (1, ∞), got {q}"));
    }
    Ok(())
}

/// `∫₀^{s} M(t) t^(−q−1) dt`, summed over decade shells below `s` with a
/// geometric completion once shell ratios settle.
pub fn power_weighted_integral(m: &OrliczFunction, q: f64, s: f64) -> Result<f64> {
    check_q(q)?;
    if s <= 0.0 {
        return Ok(0.0);
    }
    let breaks = m.kinks();
    let f = |t: f64| m.eval(t) * t.powf(-q - 1.0);
    let opts = tight();
    let mut shells: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut hi = s;
    loop {
        let lo = hi / 10.0;
        if lo < 1e-290 {
            break;
        }
        let v = integrate_with_breaks(f, lo, hi, &breaks, &opts)?;
        if v == 0.0 {
            return Ok(total);
        }
        total += v;
        shells.push(v);
        hi = lo;
        let n = shells.len();
        if n >= 4 {
            let r: Vec<f64> = (n - 3..n).map(|i| shells[i] / shells[i - 1]).collect();
            if r.iter().all(|&x| x >= 1.0 - 1e-9) {
                return Err(Error::Divergent(format!(
                    "∫₀^s M(t) t^(−q−1) dt diverges at 0 (shell ratio {:.6}); M(t)/t^q does not tend to 0",
                    r[2]
                )));
            }
            let spread = r.iter().fold(0.0f64, |acc, &x| acc.max((x - r[2]).abs()));
            if r[2] < 1.0 && spread <= 1e-7 * r[2] {
                return Ok(total + v * r[2] / (1.0 - r[2]));
            }
        }
    }
    let n = shells.len();
    let r = shells[n - 1] / shells[n - 2];
    if r >= 1.0 {
        return Err(Error::Divergent("shell sums do not decay".into()));
    }
    Ok(total + shells[n - 1] * r / (1.0 - r))
}

/// `C = sup_s s^q/M(s) · ∫₀^s M(t) t^(−q−1) dt` over the grid.
pub fn check_integral_condition(m: &OrliczFunction, q: f64, spec: &GridSpec) -> Result<ConditionReport> {
    check_q(q)?;
    let grid = spec.build(m)?;
    let mut report = ConditionReport {
        condition: ConditionId::Integral,
        q,
        grid: grid.clone(),
        constant: f64::INFINITY,
        c: None,
        pass: false,
        argmax: None,
        diagnostic: None,
    };
    let mut j = match power_weighted_integral(m, q, grid[0]) {
        Ok(v) => v,
        Err(Error::Divergent(msg)) => {
            report.diagnostic = Some(msg);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let breaks = m.kinks();
    let f = |t: f64| m.eval(t) * t.powf(-q - 1.0);
    let (mut best, mut at) = (0.0f64, grid[0]);
    for i in 0..grid.len() {
        if i > 0 {
            j += integrate_with_breaks(f, grid[i - 1], grid[i], &breaks, &tight())?;
        }
        let s = grid[i];
        let ms = m.eval(s);
        let c = if ms == 0.0 { 0.0 } else { j * s.powf(q) / ms };
        if c > best {
            best = c;
            at = s;
        }
    }
    report.constant = best;
    report.argmax = Some(at);
    report.pass = best.is_finite();
    Ok(report)
}

/// Searches `c = 2^(−k/4)`, `k = 1..160`, for the smallest
/// `γ(c) = sup_s M(cs) / (c^q M(s))` below 1.
pub fn check_pointwise_condition(m: &OrliczFunction, q: f64, spec: &GridSpec) -> Result<ConditionReport> {
    check_q(q)?;
    let grid = spec.build(m)?;
    let values: Vec<f64> = grid.iter().map(|&s| m.eval(s)).collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 1..=160 {
        let c = 2f64.powf(-(k as f64) / 4.0);
        let cq = c.powf(q);
        let (mut gamma, mut at) = (0.0f64, grid[0]);
        for (&s, &ms) in grid.iter().zip(&values) {
            if ms == 0.0 {
                continue;
            }
            let ratio = m.eval(c * s) / (cq * ms);
            if ratio > gamma {
                gamma = ratio;
                at = s;
            }
        }
        if best.is_none_or(|(_, g, _)| gamma < g) {
            best = Some((c, gamma, at));
        }
    }
    let (c, gamma, at) = best.unwrap();
    let pass = gamma < 1.0 - 1e-9;
    Ok(ConditionReport {
        condition: ConditionId::Pointwise,
        q,
        grid,
        constant: gamma,
        c: Some(c),
        pass,
        argmax: Some(at),
        diagnostic: (!pass).then(|| "no c on the search grid gives γ(c) < 1 (not a proof of failure)".into()),
    })
}

/// Checks `M*(γ⁻¹c^(1−q) s) ≤ γ⁻¹c^(−q) M*(s)` on a log grid of `points` slopes.
///
/// Reports the largest ratio of left to right side as the constant.
pub fn check_dual_condition(m: &OrliczFunction, q: f64, c: f64, gamma: f64, points: usize) -> Result<ConditionReport> {
    check_q(q)?;
    if !(c > 0.0 && c < 1.0 && gamma > 0.0) {
        return invalid("dual check needs 0 < c < 1 and γ > 0");
    }
    let stretch = c.powf(1.0 - q) / gamma;
    let top = match m.tail_slope() {
        Some(slope) => slope / stretch,
        None => m.deriv(1, m.inverse(1.0)?),
    };
    let grid = log_grid(top * 1e-6, top, points.max(2));
    let star = conjugate(m);
    let factor = c.powf(-q) / gamma;
    let (mut worst, mut at) = (0.0f64, grid[0]);
    for &s in &grid {
        let lhs = star.eval(stretch * s);
        let rhs = factor * star.eval(s);
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        if ratio.is_nan() || ratio > worst {
            worst = if ratio.is_nan() { f64::INFINITY } else { ratio };
            at = s;
        }
    }
    Ok(ConditionReport {
        condition: ConditionId::Dual,
        q,
        grid,
        constant: worst,
        c: Some(c),
        pass: worst <= 1.0 + 1e-8,
        argmax: Some(at),
        diagnostic: None,
    })
}

/// Estimated limits at 0 of `M(t)/t^q`, `M'(t)/t^(q−1)` and `M''(t)/t^(q−2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimates {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// Extrapolates a sequence sampled along `t_k = t₀·10^(−k)`.
///
/// Settled sequences return their last value; sequences whose increments shrink
/// geometrically are completed by Aitken's Δ²; geometric growth is `+∞`.
fn extrapolate(seq: &[f64], what: &str) -> Result<f64> {
    let a = &seq[seq.len() - 5..];
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::LimitNotFound(format!("{what}: non-finite terms")));
    }
    let d: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
    let last = a[4];
    if d.iter().all(|x| x.abs() <= 1e-12 * last.abs().max(1e-300)) {
        return Ok(last);
    }
    if d.iter().all(|&x| x != 0.0) {
        let rho: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
        let spread = rho.iter().fold(0.0f64, |acc, &x| acc.max((x - rho[2]).abs()));
        let r = rho[2];
        if spread <= 1e-3 * r.abs() {
            if r.abs() < 1.0 {
                return Ok(last + d[3] * r / (1.0 - r));
            }
            if r > 1.0 && a.iter().all(|&x| x > 0.0) {
                return Ok(f64::INFINITY);
            }
        }
    }
    Err(Error::LimitNotFound(format!(
        "{what}: terms {:?} neither settle nor converge geometrically",
        a
    )))
}

/// Evaluates each ratio on `t_k = t₀·10^(−k)`, `k = 0..40`, with `t₀` half the
/// first kink (or of `M⁻¹(1)`), then extrapolates.
pub fn check_limits(m: &OrliczFunction, q: f64) -> Result<LimitEstimates> {
    check_q(q)?;
    let mut t0 = m.inverse(1.0)?;
    if let Some(&k) = m.kinks().iter().find(|&&k| k > 0.0) {
        t0 = t0.min(k);
    }
    t0 *= 0.5;
    let ts: Vec<f64> = (0..=40).map(|k| t0 * 10f64.powi(-k)).collect();
    let seq = |order: u32| -> Vec<f64> {
        ts.iter()
            .map(|&t| m.deriv(order, t) / t.powf(q - order as f64))
            .collect()
    };
    Ok(LimitEstimates {
        value: extrapolate(&seq(0), "M(t)/t^q")?,
        first: extrapolate(&seq(1), "M'(t)/t^(q-1)")?,
        second: extrapolate(&seq(2), "M''(t)/t^(q-2)")?,
    })
}
