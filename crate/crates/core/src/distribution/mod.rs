//! Nonnegative random variables represented by their survival function
//! `S(x) = P(X ≥ x)`, which is left-continuous; atoms are its jumps.

mod moments;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::orlicz::{log_grid, Branch, OrliczFunction};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::roots;

pub use moments::{certify_q_integrability, moment_integral, IntegrabilityCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// JSON description of a distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    ParetoQ {
        q: f64,
    },
    Uniform {
        #[serde(default)]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
    Constant {
        value: f64,
    },
    /// `p = null` stands for `p = ∞`.
    FromOrlicz {
        orlicz: OrliczFunction,
        p: Option<f64>,
    },
    FromOrliczMax {
        orlicz: OrliczFunction,
    },
    CustomTable {
        x: Vec<f64>,
        survival: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

/// Shape of `S` on one smooth segment, used for quantile inversion.
#[derive(Clone, Copy, Debug)]
enum Shape {
    /// `S(x) = k·x^(−r) + c`.
    PowerLaw { k: f64, r: f64, c: f64 },
    Linear,
    Numeric,
}

/// Open-closed interval `(lo, hi]` on which `S` is continuous, running from
/// `s_lo = S(lo⁺)` down to `s_hi = S(hi)`.
#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    s_lo: f64,
    s_hi: f64,
    shape: Shape,
}

#[derive(Clone, Debug)]
enum Kind {
    ParetoQ { q: f64, start: f64 },
    Uniform { lo: f64, hi: f64 },
    Constant { value: f64 },
    FromOrlicz { m: OrliczFunction, p: f64 },
    /// `cum[j] = ∫_{[0, lo_j]} s dM'(s)` for each branch start `lo_j`.
    OrliczMax { m: OrliczFunction, cum: Vec<f64> },
    Table { x: Vec<f64>, s: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct Distribution {
    spec: DistributionSpec,
    kind: Kind,
    segments: Vec<Segment>,
    atoms: Vec<Atom>,
    support: (f64, f64),
    tail_index: f64,
}

impl Serialize for Distribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = DistributionSpec::deserialize(d)?;
        Distribution::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Pareto-type law with density `q(q−1)x^(−q−1)` on `[(q−1)^(1/q), ∞)`.
pub fn pareto_q(q: f64) -> Result<Distribution> {
    Distribution::from_spec(&DistributionSpec::ParetoQ { q })
}

/// Law with `S(x) = −M(1/x) + x⁻¹M'(1/x) − (1/p)x⁻²M''(1/x)`; `p = ∞` drops the last term.
pub fn density_from_orlicz(m: &OrliczFunction, p: f64) -> Result<Distribution> {
    let p = if p.is_infinite() { None } else { Some(p) };
    Distribution::from_spec(&DistributionSpec::FromOrlicz {
        orlicz: m.clone(),
        p,
    })
}

/// Law with `P(X ≥ t) = ∫_{[0,1/t]} s dM'(s)`, computed by Stieltjes quadrature.
pub fn distribution_from_orlicz_max(m: &OrliczFunction) -> Result<Distribution> {
    Distribution::from_spec(&DistributionSpec::FromOrliczMax { orlicz: m.clone() })
}

fn recip(t: f64) -> f64 {
    if t == 0.0 {
        f64::INFINITY
    } else if t.is_infinite() {
        0.0
    } else {
        1.0 / t
    }
}

/// Survival formula of one branch at `y = 1/x`.
fn branch_survival(branch: &Branch, p: f64, y: f64) -> f64 {
    let base = -branch.deriv(0, y) + y * branch.deriv(1, y);
    if p.is_infinite() {
        base
    } else {
        base - y * y * branch.deriv(2, y) / p
    }
}

/// Density of the p-construction at `x`, evaluated on `branch`.
fn branch_density(branch: &Branch, p: f64, x: f64) -> f64 {
    let y = 1.0 / x;
    let y3 = y * y * y;
    if p.is_infinite() {
        y3 * branch.deriv(2, y)
    } else {
        y3 * ((1.0 - 2.0 / p) * branch.deriv(2, y) - y * branch.deriv(3, y) / p)
    }
}

fn power_shape(branch: &Branch, p: f64) -> Shape {
    let Branch::Power { terms } = branch else {
        if let Branch::Affine { intercept, .. } = branch {
            return Shape::PowerLaw { k: 0.0, r: 1.0, c: -intercept };
        }
        return Shape::Numeric;
    };
    let mut r = None;
    let (mut k, mut c) = (0.0, 0.0);
    for t in terms {
        if t.coeff == 0.0 || t.exponent == 1.0 {
            continue;
        }
        if t.exponent == 0.0 {
            c -= t.coeff;
            continue;
        }
        match r {
            None => r = Some(t.exponent),
            Some(e) if e == t.exponent => {}
            Some(_) => return Shape::Numeric,
        }
        let e = t.exponent;
        let factor = if p.is_infinite() { e - 1.0 } else { (e - 1.0) * (1.0 - e / p) };
        k += t.coeff * factor;
    }
    Shape::PowerLaw {
        k,
        r: r.unwrap_or(1.0),
        c,
    }
}

const QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-11,
    max_intervals: 4000,
};

/// Piece of a generating function holding `y = 1/x`. An `x` within rounding
/// of the image of a kink is snapped onto the kink, so that the atom there is
/// counted in `P(X ≥ x)`.
fn locate(m: &OrliczFunction, x: f64) -> (usize, f64) {
    let pieces = m.pieces();
    for (j, pc) in pieces.iter().enumerate().skip(1) {
        if (pc.domain.lo * x - 1.0).abs() <= 1e-13 {
            return (j, pc.domain.lo);
        }
    }
    let y = 1.0 / x;
    (pieces.partition_point(|pc| pc.domain.lo <= y).saturating_sub(1), y)
}

impl Distribution {
    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::ParetoQ { q } => {
                let q = *q;
                if !(q > 1.0) || !q.is_finite() {
                    return invalid(format!("pareto_q needs q > 1, got {q}"));
                }
                let start = (q - 1.0).powf(1.0 / q);
                let seg = Segment {
                    lo: start,
                    hi: f64::INFINITY,
                    s_lo: 1.0,
                    s_hi: 0.0,
                    shape: Shape::PowerLaw { k: q - 1.0, r: q, c: 0.0 },
                };
                Ok(Self::assemble(spec.clone(), Kind::ParetoQ { q, start }, vec![seg], q)?)
            }
            DistributionSpec::Uniform { lo, hi } => {
                let (lo, hi) = (*lo, *hi);
                if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                    return invalid(format!("uniform needs 0 ≤ lo < hi < ∞, got [{lo}, {hi}]"));
                }
                let seg = Segment {
                    lo,
                    hi,
                    s_lo: 1.0,
                    s_hi: 0.0,
                    shape: Shape::Linear,
                };
                Self::assemble(spec.clone(), Kind::Uniform { lo, hi }, vec![seg], f64::INFINITY)
            }
            DistributionSpec::Constant { value } => {
                let v = *value;
                if !(v >= 0.0 && v.is_finite()) {
                    return invalid(format!("constant must be finite and nonnegative, got {v}"));
                }
                let seg = Segment {
                    lo: v,
                    hi: f64::INFINITY,
                    s_lo: 0.0,
                    s_hi: 0.0,
                    shape: Shape::PowerLaw { k: 0.0, r: 1.0, c: 0.0 },
                };
                Self::assemble(spec.clone(), Kind::Constant { value: v }, vec![seg], f64::INFINITY)
            }
            DistributionSpec::FromOrlicz { orlicz, p } => {
                let p = p.unwrap_or(f64::INFINITY);
                if !(p > 1.0) {
                    return invalid(format!("p must exceed 1, got {p}"));
                }
                Self::check_generator(orlicz)?;
                let segments = orlicz
                    .pieces()
                    .iter()
                    .rev()
                    .map(|piece| Segment {
                        lo: recip(piece.domain.hi),
                        hi: recip(piece.domain.lo),
                        s_lo: if piece.domain.hi.is_finite() {
                            branch_survival(&piece.branch, p, piece.domain.hi)
                        } else {
                            1.0
                        },
                        s_hi: if piece.domain.lo > 0.0 {
                            branch_survival(&piece.branch, p, piece.domain.lo)
                        } else {
                            0.0
                        },
                        shape: power_shape(&piece.branch, p),
                    })
                    .collect();
                let tail = Self::orlicz_tail_index(orlicz);
                let d = Self::assemble(spec.clone(), Kind::FromOrlicz { m: orlicz.clone(), p }, segments, tail)?;
                d.check_density_sign()?;
                Ok(d)
            }
            DistributionSpec::FromOrliczMax { orlicz } => {
                Self::check_generator(orlicz)?;
                let pieces = orlicz.pieces();
                let mut cum = vec![0.0; pieces.len()];
                for j in 1..pieces.len() {
                    let prev = &pieces[j - 1];
                    let (a, b) = (prev.domain.lo, prev.domain.hi);
                    let smooth = integrate(|s| s * prev.branch.deriv(2, s), a, b, &QUAD)?.value;
                    let jump = b * (pieces[j].branch.deriv(1, b) - prev.branch.deriv(1, b));
                    cum[j] = cum[j - 1] + smooth + jump;
                }
                let kind = Kind::OrliczMax { m: orlicz.clone(), cum };
                let mut d = Self {
                    spec: spec.clone(),
                    kind,
                    segments: vec![],
                    atoms: vec![],
                    support: (0.0, f64::INFINITY),
                    tail_index: Self::orlicz_tail_index(orlicz),
                };
                let segments = pieces
                    .iter()
                    .rev()
                    .map(|piece| {
                        let (lo, hi) = (recip(piece.domain.hi), recip(piece.domain.lo));
                        let s_lo = if piece.domain.hi.is_finite() {
                            d.stieltjes_left(piece.domain.hi)
                        } else {
                            1.0
                        };
                        Segment {
                            lo,
                            hi,
                            s_lo,
                            s_hi: d.survival(hi),
                            shape: Shape::Numeric,
                        }
                    })
                    .collect();
                let tail = d.tail_index;
                d = Self::assemble(spec.clone(), d.kind, segments, tail)?;
                Ok(d)
            }
            DistributionSpec::CustomTable { x, survival } => {
                if x.len() < 2 || x.len() != survival.len() {
                    return invalid("custom table needs at least two (x, survival) pairs");
                }
                if !(x[0] >= 0.0) || x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|v| !v.is_finite()) {
                    return invalid("custom table abscissae must be finite, nonnegative and increasing");
                }
                if survival.iter().any(|s| !(0.0..=1.0).contains(s)) || survival.windows(2).any(|w| w[1] > w[0]) {
                    return invalid("custom table survival values must be nonincreasing in [0, 1]");
                }
                if *survival.last().unwrap() != 0.0 {
                    return invalid("custom table survival must end at 0");
                }
                let segments = x
                    .windows(2)
                    .zip(survival.windows(2))
                    .map(|(xs, ss)| Segment {
                        lo: xs[0],
                        hi: xs[1],
                        s_lo: ss[0],
                        s_hi: ss[1],
                        shape: Shape::Linear,
                    })
                    .collect();
                let kind = Kind::Table {
                    x: x.clone(),
                    s: survival.clone(),
                };
                Self::assemble(spec.clone(), kind, segments, f64::INFINITY)
            }
        }
    }

    fn check_generator(m: &OrliczFunction) -> Result<()> {
        if !m.is_normalized() {
            return Err(Error::NotNormalized(m.normalization_integral()));
        }
        let d0 = m.deriv(1, 0.0);
        if d0 != 0.0 {
            return invalid(format!("generating function needs M'(0) = 0, got {d0}"));
        }
        Ok(())
    }

    fn orlicz_tail_index(m: &OrliczFunction) -> f64 {
        if m.zero_set_end() > 0.0 {
            f64::INFINITY
        } else {
            m.exponent_at_zero()
        }
    }

    /// Drops segments outside the support, collects atoms and fixes the support.
    fn assemble(spec: DistributionSpec, kind: Kind, segments: Vec<Segment>, tail_index: f64) -> Result<Self> {
        const TINY: f64 = 1e-15;
        let mut kept: Vec<Segment> = Vec::new();
        let mut atoms = Vec::new();
        let mut level = 1.0;
        for seg in segments {
            if seg.hi <= seg.lo {
                continue;
            }
            if seg.s_lo >= 1.0 - TINY && seg.s_hi >= 1.0 - TINY {
                level = 1.0;
                continue;
            }
            let jump = level - seg.s_lo;
            if jump < -1e-10 {
                return Err(Error::NegativeDensity { x: seg.lo, value: jump });
            }
            if jump > TINY {
                atoms.push(Atom { at: seg.lo, mass: jump });
            }
            if seg.s_hi > seg.s_lo + 1e-10 {
                return Err(Error::NegativeDensity { x: seg.hi, value: seg.s_lo - seg.s_hi });
            }
            level = seg.s_hi;
            if seg.s_lo <= TINY {
                break;
            }
            kept.push(seg);
            if level <= TINY {
                break;
            }
        }
        let lo = match (kept.first(), atoms.first()) {
            (Some(s), Some(a)) => s.lo.min(a.at),
            (Some(s), None) => s.lo,
            (None, Some(a)) => a.at,
            (None, None) => return invalid("distribution carries no mass"),
        };
        let hi = match (kept.last(), atoms.last()) {
            (Some(s), Some(a)) => s.hi.max(a.at),
            (Some(s), None) => s.hi,
            (None, Some(a)) => a.at,
            (None, None) => unreachable!(),
        };
        Ok(Self {
            spec,
            kind,
            segments: kept,
            atoms,
            support: (lo, hi),
            tail_index: if hi.is_finite() { f64::INFINITY } else { tail_index },
        })
    }

    /// Checks the density formula on the interior of every smooth segment.
    fn check_density_sign(&self) -> Result<()> {
        for seg in &self.segments {
            if let Shape::PowerLaw { k, .. } = seg.shape {
                if k < 0.0 {
                    return Err(Error::NegativeDensity { x: seg.lo, value: k });
                }
                continue;
            }
            let hi = if seg.hi.is_finite() { seg.hi } else { seg.lo.max(1e-300) * 1e8 };
            let lo = seg.lo.max(hi * 1e-12);
            for x in log_grid(lo, hi, 66).into_iter().skip(1).take(64) {
                let f = self.density(x);
                if f < -1e-10 * (1.0 + x.powi(-3)) {
                    return Err(Error::NegativeDensity { x, value: f });
                }
            }
        }
        Ok(())
    }

    /// `∫_{[0, y)} s dM'(s)` for the Stieltjes construction.
    fn stieltjes_left(&self, y: f64) -> f64 {
        let Kind::OrliczMax { m, cum } = &self.kind else { unreachable!() };
        let pieces = m.pieces();
        let j = pieces.partition_point(|p| p.domain.lo < y).saturating_sub(1);
        let piece = &pieces[j];
        let part = integrate(|s| s * piece.branch.deriv(2, s), piece.domain.lo, y, &QUAD)
            .map(|q| q.value)
            .unwrap_or(f64::NAN);
        cum[j] + part
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Closed support `[lo, hi]`; `hi` may be `∞`.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Moments `E X^r` are finite exactly for `r` below this index.
    pub fn tail_index(&self) -> f64 {
        self.tail_index
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Points where the density may be non-smooth.
    pub fn breaks(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.lo, s.hi])
            .chain(self.atoms.iter().map(|a| a.at))
            .filter(|x| x.is_finite())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// The generating Orlicz function and parameter `p`, when built from one.
    pub fn generator(&self) -> Option<(&OrliczFunction, f64)> {
        match &self.kind {
            Kind::FromOrlicz { m, p } => Some((m, *p)),
            Kind::OrliczMax { m, .. } => Some((m, f64::INFINITY)),
            _ => None,
        }
    }

    /// `P(X ≥ x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let s = match &self.kind {
            Kind::ParetoQ { q, start } => {
                if x <= *start {
                    1.0
                } else {
                    (q - 1.0) * x.powf(-q)
                }
            }
            Kind::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            Kind::Constant { value } => {
                if x <= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::FromOrlicz { m, p } => {
                let (j, y) = locate(m, x);
                branch_survival(&m.pieces()[j].branch, *p, y)
            }
            Kind::OrliczMax { m, cum } => {
                let (j, y) = locate(m, x);
                let piece = &m.pieces()[j];
                let part = integrate(|s| s * piece.branch.deriv(2, s), piece.domain.lo, y, &QUAD)
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN);
                cum[j] + part
            }
            Kind::Table { x: xs, s } => {
                if x <= xs[0] {
                    1.0
                } else if x >= *xs.last().unwrap() {
                    0.0
                } else {
                    let i = xs.partition_point(|&v| v < x) - 1;
                    let u = (x - xs[i]) / (xs[i + 1] - xs[i]);
                    s[i] + u * (s[i + 1] - s[i])
                }
            }
        };
        s.clamp(0.0, 1.0)
    }

    /// `P(X > x)`.
    pub fn survival_right(&self, x: f64) -> f64 {
        let atom: f64 = self.atoms.iter().filter(|a| (a.at - x).abs() <= 1e-13 * a.at).map(|a| a.mass).sum();
        (self.survival(x) - atom).max(0.0)
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival_right(x)
    }

    /// Density of the continuous part.
    pub fn density(&self, x: f64) -> f64 {
        if !(x > 0.0) || x < self.support.0 || x > self.support.1 {
            return 0.0;
        }
        match &self.kind {
            Kind::ParetoQ { q, .. } => q * (q - 1.0) * x.powf(-q - 1.0),
            Kind::Uniform { lo, hi } => 1.0 / (hi - lo),
            Kind::Constant { .. } => 0.0,
            Kind::FromOrlicz { m, p } => {
                let y = 1.0 / x;
                let pieces = m.pieces();
                let j = pieces.partition_point(|pc| pc.domain.lo <= y).saturating_sub(1);
                branch_density(&pieces[j].branch, *p, x)
            }
            Kind::OrliczMax { m, .. } => {
                let y = 1.0 / x;
                y * y * y * m.deriv(2, y)
            }
            Kind::Table { x: xs, s } => {
                if x >= *xs.last().unwrap() {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= x).max(1) - 1;
                (s[i] - s[i + 1]) / (xs[i + 1] - xs[i])
            }
        }
    }

    /// `inf{x : S(x) ≤ 1 − u}` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let v = 1.0 - u;
        for seg in &self.segments {
            if v >= seg.s_lo {
                return seg.lo;
            }
            if v >= seg.s_hi {
                return self.invert_segment(seg, v);
            }
        }
        self.support.1
    }

    fn invert_segment(&self, seg: &Segment, v: f64) -> f64 {
        match seg.shape {
            Shape::PowerLaw { k, r, c } if k > 0.0 => (k / (v - c)).powf(1.0 / r).clamp(seg.lo, seg.hi),
            Shape::Linear => {
                let u = (seg.s_lo - v) / (seg.s_lo - seg.s_hi);
                (seg.lo + u * (seg.hi - seg.lo)).clamp(seg.lo, seg.hi)
            }
            _ => {
                let below = |x: f64| self.survival(x) <= v;
                let hi = if seg.hi.is_finite() {
                    seg.hi
                } else {
                    roots::expand_upper(seg.lo.max(1e-300) * 2.0, f64::MAX, below).unwrap_or(f64::MAX)
                };
                roots::bisect_predicate(seg.lo, hi, 1e-14, below)
            }
        }
    }

    /// One inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// `count` draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample_n(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }

    /// `∫_lo^hi g(x) f(x) dx` over the continuous part only.
    ///
    /// `growth` bounds the polynomial growth of `g` at infinity and picks the
    /// tail substitution; it must stay below the tail index.
    pub fn expect_continuous<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64, growth: f64) -> Result<f64> {
        let mut sum = 0.0;
        let f = |x: f64| {
            let d = self.density(x);
            if d == 0.0 {
                0.0
            } else {
                g(x) * d
            }
        };
        for seg in &self.segments {
            let (a, b) = (seg.lo.max(lo), seg.hi.min(hi));
            if !(b > a) {
                continue;
            }
            if b.is_finite() {
                sum += integrate(f, a, b, &QUAD)?.value;
            } else {
                if !(self.tail_index > growth) {
                    return Err(Error::NotIntegrable(format!(
                        "integrand grows like x^{growth} but the tail index is {}",
                        self.tail_index
                    )));
                }
                let k = 1.0 / (self.tail_index - growth);
                sum += integrate_to_infinity(f, a.max(f64::MIN_POSITIVE), k, &QUAD)?;
            }
        }
        Ok(sum)
    }

    /// `Σ g(x_k) m_k` over atoms with `lo ≤ x_k < hi`, or `lo ≤ x_k ≤ hi` when `closed`.
    pub fn atom_sum<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64, closed: bool) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.at >= lo && (a.at < hi || closed && a.at == hi))
            .map(|a| g(a.at) * a.mass)
            .sum()
    }

    /// `∫_{[lo, hi)} g dP`: quadrature of the continuous part plus atoms.
    pub fn expect_range<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64, growth: f64) -> Result<f64> {
        Ok(self.expect_continuous(&g, lo, hi, growth)? + self.atom_sum(&g, lo, hi, false))
    }

    /// `E g(X)`.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, growth: f64) -> Result<f64> {
        self.expect_range(g, 0.0, f64::INFINITY, growth)
    }

    /// `E X^r`.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if r >= self.tail_index {
            return Err(Error::NotIntegrable(format!(
                "E X^{r} is infinite: tail index {}",
                self.tail_index
            )));
        }
        self.expect(|x| x.powf(r), r)
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1.0)
    }

    /// Continuous mass plus atoms; 1 up to quadrature error for valid laws.
    pub fn total_mass(&self) -> Result<f64> {
        self.expect(|_| 1.0, 0.0)
    }
}
