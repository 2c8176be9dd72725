//! Orlicz functions and the operations on them.
//!
//! An [`OrliczFunction`] is a list of branches, each valid on a closed-open
//! domain `[lo, hi)`, that together cover `[0, ∞)`. Branches are closed-form
//! power sums, affine maps, or grid-backed Hermite tables. All derivatives are
//! right derivatives unless the `_left` variant is used; derivatives may jump
//! at branch boundaries (kinks).

mod conditions;
mod conjugate;
mod equivalence;
mod norm;
mod normalize;
mod table;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::roots;

pub use conditions::{
    check_dual_condition, check_integral_condition, check_limits, check_pointwise_condition,
    power_weighted_integral, ConditionId, ConditionReport, GridSpec, LimitEstimates,
};
pub use conjugate::{conjugate, Conjugate};
pub use equivalence::{check_equivalence, equivalence_constants, EquivalenceConstants};
pub use norm::{lp_norm, luxemburg_norm, nested_norm};
pub use normalize::{normalize_by_linearization, NormalizeMode};
pub use table::HermiteTable;

/// `coeff · t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent }
    }

    fn deriv(&self, k: u32, t: f64) -> f64 {
        let mut c = self.coeff;
        for i in 0..k {
            c *= self.exponent - i as f64;
        }
        if c == 0.0 {
            return 0.0;
        }
        let e = self.exponent - k as f64;
        if e == 0.0 {
            c
        } else {
            c * t.powf(e)
        }
    }
}

/// Closed-form or tabulated representation of one branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    Power { terms: Vec<PowerTerm> },
    Affine { slope: f64, intercept: f64 },
    Table(HermiteTable),
}

impl Branch {
    pub fn deriv(&self, k: u32, t: f64) -> f64 {
        match self {
            Branch::Power { terms } => terms.iter().map(|term| term.deriv(k, t)).sum(),
            Branch::Affine { slope, intercept } => match k {
                0 => slope * t + intercept,
                1 => *slope,
                _ => 0.0,
            },
            Branch::Table(table) => table.deriv(k, t),
        }
    }

    /// Whether the branch is exactly affine.
    pub fn is_affine(&self) -> bool {
        match self {
            Branch::Affine { .. } => true,
            Branch::Power { terms } => terms
                .iter()
                .all(|t| t.coeff == 0.0 || t.exponent == 0.0 || t.exponent == 1.0),
            Branch::Table(_) => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Branch::Power { terms } => {
                if terms.iter().any(|t| !t.coeff.is_finite() || !t.exponent.is_finite() || t.exponent < 0.0) {
                    return invalid("power terms need finite coefficients and nonnegative exponents");
                }
            }
            Branch::Affine { slope, intercept } => {
                if !slope.is_finite() || !intercept.is_finite() {
                    return invalid("affine branch parameters must be finite");
                }
            }
            Branch::Table(table) => table.validate()?,
        }
        Ok(())
    }
}

/// Closed-open interval `[lo, hi)`; `hi` may be `∞` (serialized as `null`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let hi = if self.hi.is_finite() { Some(self.hi) } else { None };
        (self.lo, hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi): (f64, Option<f64>) = Deserialize::deserialize(d)?;
        Ok(Domain {
            lo,
            hi: hi.unwrap_or(f64::INFINITY),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(flatten)]
    pub branch: Branch,
    pub domain: Domain,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, branch: Branch) -> Self {
        Self {
            branch,
            domain: Domain { lo, hi },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub normalized: bool,
    pub linear_tail: bool,
}

#[derive(Serialize, Deserialize)]
struct RawOrlicz {
    branches: Vec<Piece>,
    #[serde(default)]
    kink: Option<f64>,
    #[serde(default)]
    flags: Flags,
}

/// Tolerance for the `normalized` flag.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Convex `M: [0, ∞) → [0, ∞)` with `M(0) = 0`, stored as a branch list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrlicz", into = "RawOrlicz")]
pub struct OrliczFunction {
    pieces: Vec<Piece>,
    kink: Option<f64>,
    flags: Flags,
}

impl TryFrom<RawOrlicz> for OrliczFunction {
    type Error = Error;

    fn try_from(raw: RawOrlicz) -> Result<Self> {
        let m = OrliczFunction::from_pieces(raw.branches)?;
        if let (Some(given), Some(derived)) = (raw.kink, m.kink) {
            if (given - derived).abs() > 1e-12 * derived.max(1.0) {
                return invalid(format!(
                    "declared kink {given} does not match start of linear tail {derived}"
                ));
            }
        }
        Ok(m)
    }
}

impl From<OrliczFunction> for RawOrlicz {
    fn from(m: OrliczFunction) -> Self {
        RawOrlicz {
            branches: m.pieces,
            kink: m.kink,
            flags: m.flags,
        }
    }
}

impl OrliczFunction {
    /// Builds a function from contiguous pieces covering `[0, ∞)`.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("an Orlicz function needs at least one branch");
        }
        if pieces[0].domain.lo != 0.0 {
            return invalid("first branch must start at 0");
        }
        if pieces.last().unwrap().domain.hi != f64::INFINITY {
            return invalid("last branch must extend to infinity");
        }
        for p in &pieces {
            p.branch.validate()?;
            if !(p.domain.hi > p.domain.lo) {
                return invalid(format!("empty branch domain [{}, {})", p.domain.lo, p.domain.hi));
            }
        }
        for w in pieces.windows(2) {
            let t = w[0].domain.hi;
            if t != w[1].domain.lo {
                return invalid(format!("branch domains are not contiguous at {t}"));
            }
            let (left, right) = (w[0].branch.deriv(0, t), w[1].branch.deriv(0, t));
            if (left - right).abs() > 1e-9 * left.abs().max(right.abs()).max(1.0) {
                return invalid(format!("discontinuity at {t}: {left} vs {right}"));
            }
        }
        let m0 = pieces[0].branch.deriv(0, 0.0);
        if m0.abs() > 1e-14 {
            return invalid(format!("M(0) must be 0, got {m0}"));
        }
        let last = pieces.last().unwrap();
        let linear_tail = last.branch.is_affine();
        let kink = if linear_tail && last.domain.lo > 0.0 {
            Some(last.domain.lo)
        } else {
            None
        };
        let mut m = Self {
            pieces,
            kink,
            flags: Flags {
                normalized: false,
                linear_tail,
            },
        };
        let integral = m.normalization_integral();
        m.flags.normalized = (integral - 1.0).abs() <= NORMALIZATION_TOL;
        Ok(m)
    }

    /// `t^r` on `[0, ∞)`.
    pub fn power(r: f64) -> Result<Self> {
        Self::scaled_power(1.0, r)
    }

    /// `c·t^r` on `[0, ∞)`.
    pub fn scaled_power(c: f64, r: f64) -> Result<Self> {
        if !(r >= 1.0) || !(c > 0.0) {
            return invalid(format!("c·t^r is an Orlicz function only for c > 0, r ≥ 1 (got c={c}, r={r})"));
        }
        Self::sum_of_powers(&[PowerTerm::new(c, r)])
    }

    /// `Σ c_k t^(r_k)` on `[0, ∞)`.
    pub fn sum_of_powers(terms: &[PowerTerm]) -> Result<Self> {
        Self::from_pieces(vec![Piece::new(
            0.0,
            f64::INFINITY,
            Branch::Power {
                terms: terms.to_vec(),
            },
        )])
    }

    /// `(t - a)₊`.
    pub fn shifted_linear(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return invalid("shift must be positive");
        }
        Self::from_pieces(vec![
            Piece::new(0.0, a, Branch::Power { terms: vec![] }),
            Piece::new(a, f64::INFINITY, Branch::Affine {
                slope: 1.0,
                intercept: -a,
            }),
        ])
    }

    /// C¹ piecewise power function: `t^(r₀)` on `[0, b₁)`, then `a_k t^(r_k) + c_k`
    /// on `[b_k, b_{k+1})` with `a_k, c_k` chosen to match value and slope.
    pub fn piecewise_power(breaks: &[f64], exponents: &[f64]) -> Result<Self> {
        if exponents.len() != breaks.len() + 1 {
            return invalid("need one more exponent than breakpoints");
        }
        if exponents.iter().any(|&r| !(r > 1.0)) {
            return invalid("piecewise power exponents must exceed 1");
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.first().is_some_and(|&b| !(b > 0.0)) {
            return invalid("breakpoints must be positive and increasing");
        }
        let mut pieces = Vec::with_capacity(exponents.len());
        let mut branch = Branch::Power {
            terms: vec![PowerTerm::new(1.0, exponents[0])],
        };
        let mut lo = 0.0;
        for (k, &b) in breaks.iter().enumerate() {
            let (value, slope) = (branch.deriv(0, b), branch.deriv(1, b));
            pieces.push(Piece::new(lo, b, branch));
            let r = exponents[k + 1];
            let a = slope / (r * b.powf(r - 1.0));
            let c = value - a * b.powf(r);
            branch = Branch::Power {
                terms: vec![PowerTerm::new(a, r), PowerTerm::new(c, 0.0)],
            };
            lo = b;
        }
        pieces.push(Piece::new(lo, f64::INFINITY, branch));
        Self::from_pieces(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Start of the linear tail, if any.
    pub fn kink(&self) -> Option<f64> {
        self.kink
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn is_normalized(&self) -> bool {
        self.flags.normalized
    }

    pub fn has_linear_tail(&self) -> bool {
        self.flags.linear_tail
    }

    /// Interior branch boundaries.
    pub fn kinks(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.domain.lo).collect()
    }

    fn index_right(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.domain.lo <= t).saturating_sub(1)
    }

    fn index_left(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.domain.lo < t).saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return f64::INFINITY;
        }
        let t = t.max(0.0);
        self.pieces[self.index_right(t)].branch.deriv(0, t)
    }

    /// k-th right derivative.
    pub fn deriv(&self, k: u32, t: f64) -> f64 {
        let t = t.max(0.0);
        self.pieces[self.index_right(t)].branch.deriv(k, t)
    }

    /// k-th left derivative (equals the right derivative away from kinks).
    pub fn deriv_left(&self, k: u32, t: f64) -> f64 {
        let t = t.max(0.0);
        self.pieces[self.index_left(t)].branch.deriv(k, t)
    }

    /// `∫₀^∞ x dM'(x)`, including atoms of `dM'` at kinks.
    ///
    /// Evaluated as `lim_{T→∞} (T·M'(T) − M(T))`, which is exact once the
    /// function is affine. Returns `∞` when `M` grows superlinearly.
    pub fn normalization_integral(&self) -> f64 {
        let last = self.pieces.last().unwrap();
        match &last.branch {
            b if b.is_affine() => {
                let t = last.domain.lo;
                t * b.deriv(1, t) - b.deriv(0, t)
            }
            Branch::Table(table) => {
                let (t, m, dm) = table.last_node();
                t * dm - m
            }
            _ => f64::INFINITY,
        }
    }

    /// Slope of the linear tail.
    pub fn tail_slope(&self) -> Option<f64> {
        let last = self.pieces.last().unwrap();
        match &last.branch {
            b if b.is_affine() => Some(b.deriv(1, last.domain.lo.max(1.0))),
            Branch::Table(table) => Some(table.last_node().2),
            _ => None,
        }
    }

    /// Smallest `t` with `M(t) ≥ v`.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return invalid(format!("cannot invert at {v}"));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        roots::solve_increasing(|t| self.eval(t), v, 1e300)
    }

    /// Local power exponent `lim t M'(t)/M(t)` at 0, from the first branch.
    pub fn exponent_at_zero(&self) -> f64 {
        let first = &self.pieces[0];
        match &first.branch {
            Branch::Power { terms } => terms
                .iter()
                .filter(|t| t.coeff != 0.0 && t.exponent > 0.0)
                .map(|t| t.exponent)
                .fold(f64::INFINITY, f64::min),
            Branch::Affine { slope, .. } => {
                if *slope == 0.0 {
                    f64::INFINITY
                } else {
                    1.0
                }
            }
            Branch::Table(table) => {
                if table.m[0] > 0.0 {
                    table.t[0] * table.dm[0] / table.m[0]
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Largest `t` with `M(t) = 0`.
    pub fn zero_set_end(&self) -> f64 {
        let mut end = 0.0;
        for p in &self.pieces {
            let hi = p.domain.hi;
            let probe = if hi.is_finite() { hi } else { p.domain.lo.max(1.0) * 2.0 };
            let vanishes = match &p.branch {
                Branch::Power { terms } => terms.iter().all(|t| t.coeff == 0.0),
                Branch::Affine { slope, intercept } => *slope == 0.0 && *intercept == 0.0,
                Branch::Table(_) => p.branch.deriv(0, probe) == 0.0,
            };
            if vanishes && hi.is_finite() {
                end = hi;
            } else {
                break;
            }
        }
        end
    }

    /// `a · M(t)`.
    pub fn scale_values(&self, a: f64) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let branch = match &p.branch {
                    Branch::Power { terms } => Branch::Power {
                        terms: terms.iter().map(|t| PowerTerm::new(a * t.coeff, t.exponent)).collect(),
                    },
                    Branch::Affine { slope, intercept } => Branch::Affine {
                        slope: a * slope,
                        intercept: a * intercept,
                    },
                    Branch::Table(t) => Branch::Table(HermiteTable {
                        t: t.t.clone(),
                        m: t.m.iter().map(|v| a * v).collect(),
                        dm: t.dm.iter().map(|v| a * v).collect(),
                    }),
                };
                Piece {
                    branch,
                    domain: p.domain,
                }
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// `t ↦ M(bt)` for `b > 0`.
    pub fn scale_argument(&self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return invalid(format!("argument scale must be positive, got {b}"));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let branch = match &p.branch {
                    Branch::Power { terms } => Branch::Power {
                        terms: terms
                            .iter()
                            .map(|t| PowerTerm::new(t.coeff * b.powf(t.exponent), t.exponent))
                            .collect(),
                    },
                    Branch::Affine { slope, intercept } => Branch::Affine {
                        slope: slope * b,
                        intercept: *intercept,
                    },
                    Branch::Table(t) => Branch::Table(HermiteTable {
                        t: t.t.iter().map(|v| v / b).collect(),
                        m: t.m.clone(),
                        dm: t.dm.iter().map(|v| v * b).collect(),
                    }),
                };
                Piece::new(p.domain.lo / b, p.domain.hi / b, branch)
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// Checks `M(0) = 0`, monotonicity, midpoint convexity and `M'' ≥ 0` on `grid`.
    pub fn check_invariants(&self, grid: &[f64]) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::Consistency("M(0) != 0".into()));
        }
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        for (i, w) in vals.windows(2).enumerate() {
            if w[1] < w[0] - 1e-12 * w[0].abs() {
                return Err(Error::Consistency(format!(
                    "M decreases between {} and {}",
                    grid[i],
                    grid[i + 1]
                )));
            }
        }
        for stride in [1usize, 7, 31] {
            for i in 0..grid.len().saturating_sub(stride) {
                let (a, b) = (grid[i], grid[i + stride]);
                let mid = self.eval(0.5 * (a + b));
                let chord = 0.5 * (vals[i] + vals[i + stride]);
                if mid > chord + 1e-10 * chord.abs() + 1e-300 {
                    return Err(Error::Consistency(format!("convexity fails on [{a}, {b}]")));
                }
            }
        }
        for &t in grid {
            let p = &self.pieces[self.index_right(t)];
            if matches!(p.branch, Branch::Table(_)) {
                continue;
            }
            let m2 = p.branch.deriv(2, t);
            let scale = p.branch.deriv(1, t).abs() / t.max(f64::MIN_POSITIVE);
            if m2 < -1e-10 * scale.max(1e-300) {
                return Err(Error::Consistency(format!("M'' = {m2} < 0 at {t}")));
            }
        }
        Ok(())
    }

    /// Highest order k ≤ 3 such that derivatives up to k are continuous at every kink.
    pub fn smoothness(&self) -> u32 {
        let mut order = 3;
        for t in self.kinks() {
            for k in 0..=3 {
                let (l, r) = (self.deriv_left(k, t), self.deriv(k, t));
                if (l - r).abs() > 1e-9 * l.abs().max(r.abs()).max(1.0) {
                    order = order.min(k.saturating_sub(1));
                    break;
                }
            }
        }
        order
    }
}

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else if i == 0 {
                lo
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_derivatives() {
        let m = OrliczFunction::power(2.5).unwrap();
        let t = 1.7f64;
        assert!((m.eval(t) - t.powf(2.5)).abs() < 1e-14);
        assert!((m.deriv(1, t) - 2.5 * t.powf(1.5)).abs() < 1e-13);
        assert!((m.deriv(2, t) - 3.75 * t.powf(0.5)).abs() < 1e-13);
        assert!((m.deriv(3, t) - 1.875 * t.powf(-0.5)).abs() < 1e-13);
        assert_eq!(m.deriv(1, 0.0), 0.0);
        assert!(m.kink().is_none());
        assert_eq!(m.normalization_integral(), f64::INFINITY);
    }

    #[test]
    fn shifted_linear_is_normalized() {
        let m = OrliczFunction::shifted_linear(1.0).unwrap();
        assert_eq!(m.eval(0.5), 0.0);
        assert_eq!(m.eval(3.0), 2.0);
        assert_eq!(m.kink(), Some(1.0));
        assert!(m.is_normalized());
        assert_eq!(m.deriv_left(1, 1.0), 0.0);
        assert_eq!(m.deriv(1, 1.0), 1.0);
        assert_eq!(m.zero_set_end(), 1.0);
        assert_eq!(m.smoothness(), 0);
    }

    #[test]
    fn piecewise_power_is_c1_and_convex() {
        let m = OrliczFunction::piecewise_power(&[0.1, 0.5], &[2.0, 1.3, 3.0]).unwrap();
        for t in m.kinks() {
            assert!((m.deriv_left(1, t) - m.deriv(1, t)).abs() < 1e-12);
        }
        assert_eq!(m.smoothness(), 1);
        m.check_invariants(&log_grid(1e-4, 5.0, 300)).unwrap();
    }

    #[test]
    fn rejects_bad_pieces() {
        assert!(OrliczFunction::from_pieces(vec![Piece::new(0.0, 1.0, Branch::Power { terms: vec![] })]).is_err());
        let jump = vec![
            Piece::new(0.0, 1.0, Branch::Power { terms: vec![PowerTerm::new(1.0, 2.0)] }),
            Piece::new(1.0, f64::INFINITY, Branch::Affine { slope: 2.0, intercept: 0.0 }),
        ];
        assert!(OrliczFunction::from_pieces(jump).is_err());
    }

    #[test]
    fn inverse_of_power() {
        let m = OrliczFunction::power(2.0).unwrap();
        assert!((m.inverse(9.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((m.inverse(1e-8).unwrap() - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn json_schema_round_trip() {
        let m = OrliczFunction::shifted_linear(2.0).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\":\"affine\""), "{s}");
        assert!(s.contains("\"domain\":[2.0,null]"), "{s}");
        let back: OrliczFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_wrong_kink() {
        let s = r#"{"branches":[{"kind":"power","terms":[],"domain":[0.0,1.0]},
            {"kind":"affine","slope":1.0,"intercept":-1.0,"domain":[1.0,null]}],"kink":2.0}"#;
        assert!(serde_json::from_str::<OrliczFunction>(s).is_err());
    }
}
