//! Forward maps from distributions to Orlicz functions, and the identities
//! connecting them with the generating constructions.
//!
//! All maps share one shape. With `x₀ = 1/s`, `B_p = ∫_{[0,x₀)} x^p dP`,
//! `A_q = ∫_{[x₀,∞)} x^q dP` and `S = P(X ≥ x₀)`,
//!
//! `M(s) = q/(p−q)·s^p B_p + p/(p−q)·s^q A_q − S`,
//!
//! where `q = 1` gives the p-norm map and `p = ∞` drops the `B_p` term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{density_from_orlicz, Distribution};
use crate::error::{invalid, Error, Result};
use crate::orlicz::{
    check_integral_condition, log_grid, power_weighted_integral, Branch, GridSpec, HermiteTable, OrliczFunction, Piece,
    PowerTerm,
};
use crate::quad::{integrate_with_breaks, QuadOptions};

const NODES_PER_DECADE: f64 = 128.0;
const MIN_NODES: usize = 9;

#[derive(Clone, Copy, Debug)]
struct Exponents {
    p: f64,
    q: f64,
}

/// `(M(s), M'(s))`. With `left` the atom at `1/s` is moved below the cut,
/// which gives the left derivative; the value is unchanged.
fn forward_node(d: &Distribution, e: Exponents, s: f64, left: bool) -> Result<(f64, f64)> {
    if s <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let x0 = snap_to_atom(d, 1.0 / s);
    let Exponents { p, q } = e;
    let at_cut: f64 = d.atoms().iter().filter(|a| a.at == x0).map(|a| a.mass).sum();
    let a = d.expect_continuous(|x| x.powf(q), x0, f64::INFINITY, q)?
        + d.atom_sum(|x| x.powf(q), x0, f64::INFINITY, false)
        - if left { x0.powf(q) * at_cut } else { 0.0 };
    let surv = if left { d.survival_right(x0) } else { d.survival(x0) };
    if p.is_infinite() {
        return Ok((s.powf(q) * a - surv, q * s.powf(q - 1.0) * a));
    }
    // s^p B_p, integrated as one quantity so that large p cannot overflow
    let head = |x: f64| (s * x).powf(p);
    let b = d.expect_continuous(head, 0.0, x0, p)? + d.atom_sum(head, 0.0, x0, left);
    let value = q / (p - q) * b + p / (p - q) * s.powf(q) * a - surv;
    let slope = p * q / (p - q) * (b / s + s.powf(q - 1.0) * a);
    Ok((value, slope))
}

/// Table nodes at `1/x` for an atom location `x` do not invert back exactly.
fn snap_to_atom(d: &Distribution, x: f64) -> f64 {
    d.atoms()
        .iter()
        .map(|a| a.at)
        .find(|&at| (at - x).abs() <= 1e-13 * at)
        .unwrap_or(x)
}

fn require_integrable(d: &Distribution, r: f64) -> Result<()> {
    if d.tail_index() <= r {
        return Err(Error::NotIntegrable(format!(
            "E|X|^{r} is infinite (tail index {})",
            d.tail_index()
        )));
    }
    Ok(())
}

/// `M_X(s) = s∫_{[1/s,∞)} x dP − P(X ≥ 1/s)`.
pub fn orlicz_from_max_at(d: &Distribution, s: f64) -> Result<f64> {
    require_integrable(d, 1.0)?;
    Ok(forward_node(d, Exponents { p: f64::INFINITY, q: 1.0 }, s, false)?.0)
}

/// `M_{X,p}(s) = s^p/(p−1)·∫_{[0,1/s)} x^p dP + p/(p−1)·s∫_{[1/s,∞)} x dP − P(X ≥ 1/s)`.
pub fn orlicz_from_p_norm_at(d: &Distribution, p: f64, s: f64) -> Result<f64> {
    check_p(p)?;
    require_integrable(d, 1.0)?;
    Ok(forward_node(d, Exponents { p, q: 1.0 }, s, false)?.0)
}

/// `s ↦ M_{|X|^q, p/q}(s^q)`.
pub fn orlicz_from_q_power_at(d: &Distribution, p: f64, q: f64, s: f64) -> Result<f64> {
    check_pq(p, q)?;
    require_integrable(d, q)?;
    Ok(forward_node(d, Exponents { p, q }, s, false)?.0)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) {
        return invalid(format!("p must exceed 1, got {p}"));
    }
    Ok(())
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(q >= 1.0 && q < p) {
        return invalid(format!("need 1 ≤ q < p, got q = {q}, p = {p}"));
    }
    Ok(())
}

/// Placement of tabulated pieces: optional closed-form branches on `[0, head)`
/// and `[tail, ∞)`, interior breakpoints, and the node span for open ends.
struct Layout {
    head: Option<(f64, Branch)>,
    tail: Option<(f64, Branch)>,
    breaks: Vec<f64>,
    span: (f64, f64),
}

/// Builds a function from Hermite tables between the layout's breakpoints.
///
/// `values` receives the nodes of one piece and whether its last node sits on a
/// breakpoint (so the left derivative is wanted there); it returns `(M, M')`.
fn tabulate<F>(layout: Layout, mut values: F) -> Result<OrliczFunction>
where
    F: FnMut(&[f64], bool) -> Result<Vec<(f64, f64)>>,
{
    let start = layout.head.as_ref().map_or(0.0, |h| h.0);
    let end = layout.tail.as_ref().map_or(f64::INFINITY, |t| t.0);
    let mut bounds = vec![start];
    let mut inner: Vec<f64> = layout.breaks.iter().copied().filter(|&b| b > start && b < end).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    bounds.extend(inner);
    bounds.push(end);

    let mut pieces = Vec::new();
    if let Some((h, branch)) = layout.head {
        if h > 0.0 {
            pieces.push(Piece::new(0.0, h, branch));
        }
    }
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let lo = if a == 0.0 { layout.span.0.min(0.5 * b) } else { a };
        let hi = if b.is_finite() { b } else { layout.span.1.max(2.0 * a) };
        let n = MIN_NODES.max((NODES_PER_DECADE * (hi / lo).log10()).ceil() as usize + 1);
        let nodes = log_grid(lo, hi, n);
        let vals = values(&nodes, b.is_finite())?;
        for (i, w) in vals.windows(2).enumerate() {
            if w[1].1 < w[0].1 - 1e-9 * w[0].1.abs() {
                return Err(Error::Consistency(format!(
                    "derivative decreases between {} and {}: {} → {}",
                    nodes[i],
                    nodes[i + 1],
                    w[0].1,
                    w[1].1
                )));
            }
        }
        let (m, dm): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
        pieces.push(Piece::new(a, b, Branch::Table(HermiteTable::new(nodes, m, dm)?)));
    }
    if let Some((t, branch)) = layout.tail {
        pieces.push(Piece::new(t, f64::INFINITY, branch));
    }
    OrliczFunction::from_pieces(pieces)
}

/// Nodes evaluated in parallel, assembled in grid order.
fn parallel_nodes<F>(nodes: &[f64], left_end: bool, node: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, bool) -> Result<(f64, f64)> + Sync,
{
    let last = nodes.len() - 1;
    nodes
        .par_iter()
        .enumerate()
        .map(|(i, &s)| node(s, left_end && i == last))
        .collect()
}

fn characteristic_scale(d: &Distribution) -> f64 {
    let median = d.quantile(0.5);
    if median > 0.0 && median.is_finite() {
        1.0 / median
    } else {
        1.0
    }
}

fn kink_images(d: &Distribution) -> Vec<f64> {
    d.breaks().into_iter().filter(|&x| x > 0.0).map(|x| 1.0 / x).collect()
}

fn forward_table(d: &Distribution, e: Exponents) -> Result<OrliczFunction> {
    let (lo, hi) = d.support();
    let Exponents { p, q } = e;
    let head = if hi.is_finite() {
        let terms = if p.is_infinite() {
            vec![]
        } else {
            vec![PowerTerm::new(q / (p - q) * d.moment(p)?, p)]
        };
        Some((1.0 / hi, Branch::Power { terms }))
    } else {
        None
    };
    let tail = if lo > 0.0 {
        let coeff = if p.is_infinite() { 1.0 } else { p / (p - q) } * d.moment(q)?;
        let branch = if q == 1.0 {
            Branch::Affine {
                slope: coeff,
                intercept: -1.0,
            }
        } else {
            Branch::Power {
                terms: vec![PowerTerm::new(coeff, q), PowerTerm::new(-1.0, 0.0)],
            }
        };
        Some((1.0 / lo, branch))
    } else {
        None
    };
    let scale = characteristic_scale(d);
    let layout = Layout {
        head,
        tail,
        breaks: kink_images(d),
        span: (scale * 1e-12, scale * 1e8),
    };
    tabulate(layout, |nodes, left_end| {
        parallel_nodes(nodes, left_end, |s, left| forward_node(d, e, s, left))
    })
}

/// Grid-backed `M_X`.
pub fn orlicz_from_max(d: &Distribution) -> Result<OrliczFunction> {
    require_integrable(d, 1.0)?;
    forward_table(d, Exponents { p: f64::INFINITY, q: 1.0 })
}

/// Grid-backed `M_{X,p}`; `p = ∞` falls back to [`orlicz_from_max`].
///
/// Construction fails if the tabulated derivative, which is the integrand of
/// the double-integral form, is not increasing.
pub fn orlicz_from_p_norm(d: &Distribution, p: f64) -> Result<OrliczFunction> {
    check_p(p)?;
    if p.is_infinite() {
        return orlicz_from_max(d);
    }
    require_integrable(d, 1.0)?;
    forward_table(d, Exponents { p, q: 1.0 })
}

/// Grid-backed `s ↦ M_{|X|^q, p/q}(s^q)`.
pub fn orlicz_from_q_power(d: &Distribution, p: f64, q: f64) -> Result<OrliczFunction> {
    check_pq(p, q)?;
    require_integrable(d, q)?;
    forward_table(d, Exponents { p, q })
}

/// `M_{X,p}(s)` from the double-integral form
/// `p/(p−1)∫₀^s [t^(p−1)∫_{X≤1/t} X^p dP + ∫_{X>1/t} X dP] dt`.
pub fn p_norm_double_integral(d: &Distribution, p: f64, s: f64) -> Result<f64> {
    check_p(p)?;
    require_integrable(d, 1.0)?;
    let e = Exponents { p, q: 1.0 };
    let integrand = |t: f64| forward_node(d, e, t, true).map(|v| v.1).unwrap_or(f64::NAN);
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_intervals: 2000,
    };
    integrate_with_breaks(integrand, 0.0, s, &kink_images(d), &opts)
}

/// Sup-relative deviation of one function from a reference on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub grid: Vec<f64>,
    pub max_rel_dev: f64,
    pub argmax: f64,
}

impl DeviationReport {
    fn from_pairs(grid: Vec<f64>, pairs: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut worst, mut at) = (0.0f64, grid.first().copied().unwrap_or(0.0));
        for (&s, (value, reference)) in grid.iter().zip(pairs) {
            let dev = if reference == 0.0 { value.abs() } else { ((value - reference) / reference).abs() };
            if dev > worst || dev.is_nan() {
                worst = if dev.is_nan() { f64::INFINITY } else { dev };
                at = s;
            }
        }
        Self {
            grid,
            max_rel_dev: worst,
            argmax: at,
        }
    }
}

/// Agreement of the double-integral and closed forms of `M_{X,p}` on `grid`.
pub fn p_norm_representation_gap(d: &Distribution, p: f64, grid: &[f64]) -> Result<DeviationReport> {
    let pairs = grid
        .par_iter()
        .map(|&s| Ok((p_norm_double_integral(d, p, s)?, orlicz_from_p_norm_at(d, p, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationReport::from_pairs(grid.to_vec(), pairs.into_iter()))
}

/// Generates a law from `M` and maps it back, comparing with `M` on a log grid
/// of `points` over `[t₁·10⁻⁶, t₁]`.
pub fn roundtrip_m_to_m(m: &OrliczFunction, p: f64, points: usize) -> Result<DeviationReport> {
    let Some(t1) = m.kink() else {
        return invalid("roundtrip needs a function with a linear tail");
    };
    let d = density_from_orlicz(m, p)?;
    let back = orlicz_from_p_norm(&d, p)?;
    let grid = log_grid(t1 * 1e-6, t1, points.max(2));
    let pairs: Vec<(f64, f64)> = grid.iter().map(|&s| (back.eval(s), m.eval(s))).collect();
    Ok(DeviationReport::from_pairs(grid, pairs.into_iter()))
}

/// Pointwise comparison of a reconstructed density with the true one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub grid: Vec<f64>,
    pub max_rel_err: f64,
    pub argmax: f64,
}

/// `(M''_{X,p}(s), M'''_{X,p}(s))` from `I(s) = ∫₀^{1/s} r^p f(r) dr`:
/// `M'' = p s^(p−2) I`, `M''' = p(p−2) s^(p−3) I − p s^(−4) f(1/s)`.
pub fn mxp_higher_derivatives(d: &Distribution, p: f64, s: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    if d.has_atoms() {
        return Err(Error::HasAtoms);
    }
    let x = 1.0 / s;
    let i = d.expect_continuous(|r| r.powf(p), 0.0, x, p)?;
    let m2 = p * s.powf(p - 2.0) * i;
    let m3 = p * (p - 2.0) * s.powf(p - 3.0) * i - p * s.powi(-4) * d.density(x);
    Ok((m2, m3))
}

/// Reconstructs the density as `(1−2/p)x⁻³M''(1/x) − (1/p)x⁻⁴M'''(1/x)` from
/// the derivatives of `M_{X,p}` and compares with the true density on
/// `points` interior points of the support.
pub fn density_from_mxp(d: &Distribution, p: f64, points: usize) -> Result<DensityReport> {
    check_p(p)?;
    if d.has_atoms() {
        return Err(Error::HasAtoms);
    }
    let (lo, hi) = d.support();
    let n = points.max(2);
    let grid: Vec<f64> = if hi.is_finite() {
        (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
    } else {
        log_grid(lo * (1.0 + 1e-9), lo * 1e4, n)
    };
    let errors = grid
        .par_iter()
        .map(|&x| {
            let (m2, m3) = mxp_higher_derivatives(d, p, 1.0 / x)?;
            let rebuilt = (1.0 - 2.0 / p) * x.powi(-3) * m2 - x.powi(-4) * m3 / p;
            let truth = d.density(x);
            Ok(((rebuilt - truth) / truth).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (i, worst) = errors
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &e)| if e > acc.1 || e.is_nan() { (i, e) } else { acc });
    Ok(DensityReport {
        argmax: grid[i],
        grid,
        max_rel_err: worst,
    })
}

/// `qM(s) + q(q−1)s^q ∫₀^s M(y) y^(−q−1) dy`.
pub fn closed_form_qpower_at(m: &OrliczFunction, q: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    let j = power_weighted_integral(m, q, s)?;
    Ok(q * m.eval(s) + q * (q - 1.0) * s.powf(q) * j)
}

#[derive(Clone, Debug)]
pub struct QPowerClosedForm {
    pub function: OrliczFunction,
    /// Best constant of the integral condition on the default grid.
    pub integral_constant: f64,
    /// `q(1 + C(q−1))`, an upper bound for the ratio to `M` up to `M⁻¹(1)`.
    pub bound_coefficient: f64,
}

/// Grid-backed [`closed_form_qpower_at`]; exact beyond a linear tail `σs + b`,
/// where it equals `b + K s^q`.
pub fn closed_form_qpower(m: &OrliczFunction, q: f64) -> Result<QPowerClosedForm> {
    let report = check_integral_condition(m, q, &GridSpec::default())?;
    if !report.pass {
        return Err(Error::Divergent(report.diagnostic.unwrap_or_default()));
    }
    let c = report.constant;
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    let kinks = m.kinks();
    let integrand = |t: f64| m.eval(t) * t.powf(-q - 1.0);
    let tail = match (m.kink(), m.tail_slope()) {
        (Some(t1), Some(sigma)) => {
            let b = m.eval(t1) - sigma * t1;
            let j1 = power_weighted_integral(m, q, t1)?;
            let k = q * (q - 1.0) * j1 + q * sigma * t1.powf(1.0 - q) + (q - 1.0) * b * t1.powf(-q);
            Some((t1, Branch::Power {
                terms: vec![PowerTerm::new(k, q), PowerTerm::new(b, 0.0)],
            }))
        }
        _ => None,
    };
    let top = m.kink().map_or_else(|| m.inverse(1.0), Ok)?;
    let layout = Layout {
        head: None,
        tail,
        breaks: kinks.clone(),
        span: (top * 1e-12, top * 1e8),
    };
    let mut running: Option<(f64, f64)> = None;
    let function = tabulate(layout, |nodes, left_end| {
        let last = nodes.len() - 1;
        let mut out = Vec::with_capacity(nodes.len());
        for (i, &s) in nodes.iter().enumerate() {
            let j = match running {
                None => power_weighted_integral(m, q, s)?,
                Some((prev, jp)) => jp + integrate_with_breaks(integrand, prev, s, &kinks, &opts)?,
            };
            running = Some((s, j));
            let ms = m.eval(s);
            let dm = if left_end && i == last { m.deriv_left(1, s) } else { m.deriv(1, s) };
            let value = q * ms + q * (q - 1.0) * s.powf(q) * j;
            let slope = q * dm + q * q * (q - 1.0) * s.powf(q - 1.0) * j + q * (q - 1.0) * ms / s;
            out.push((value, slope));
        }
        Ok(out)
    })?;
    Ok(QPowerClosedForm {
        function,
        integral_constant: c,
        bound_coefficient: q * (1.0 + c * (q - 1.0)),
    })
}

fn general_node(d: &Distribution, n: &OrliczFunction, s: f64, left: bool) -> Result<(f64, f64)> {
    if s <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(n.kinks().into_iter().map(|k| k / s));
    cuts.push(f64::INFINITY);
    let (mut value, mut slope) = (0.0, 0.0);
    for w in cuts.windows(2) {
        value += d.expect_continuous(|x| n.eval(s * x), w[0], w[1], 1.0)?;
        slope += d.expect_continuous(|x| x * n.deriv(1, s * x), w[0], w[1], 1.0)?;
    }
    for a in d.atoms() {
        let t = s * a.at;
        value += a.mass * n.eval(t);
        let dn = if left { n.deriv_left(1, t) } else { n.deriv(1, t) };
        slope += a.mass * a.at * dn;
    }
    Ok((value, slope))
}

/// `M(s) = ∫ N(sx) dP(x)` at one point.
pub fn orlicz_from_general_n_at(d: &Distribution, n: &OrliczFunction, s: f64) -> Result<f64> {
    require_integrable(d, 1.0)?;
    Ok(general_node(d, n, s, false)?.0)
}

/// Grid-backed `M(s) = ∫ N(sx) dP(x)`; the result is checked to be normalized.
pub fn orlicz_from_general_n(d: &Distribution, n: &OrliczFunction) -> Result<OrliczFunction> {
    if !n.is_normalized() {
        return Err(Error::NotNormalized(n.normalization_integral()));
    }
    if n.deriv(1, 0.0) != 0.0 {
        return invalid("N'(0) must vanish");
    }
    require_integrable(d, 1.0)?;
    let (lo, hi) = d.support();
    if let [atom] = d.atoms() {
        if atom.mass >= 1.0 - 1e-15 {
            return n.scale_argument(atom.at);
        }
    }
    let zero_end = n.zero_set_end();
    let head = (zero_end > 0.0 && hi.is_finite()).then(|| (zero_end / hi, Branch::Power { terms: vec![] }));
    let tail = match (n.kink(), n.tail_slope()) {
        (Some(k), Some(sigma)) if lo > 0.0 => {
            let b = n.eval(k) - sigma * k;
            Some((k / lo, Branch::Affine {
                slope: sigma * d.mean()?,
                intercept: b,
            }))
        }
        _ => None,
    };
    let mut breaks = Vec::new();
    for k in n.kinks() {
        for x in d.breaks() {
            if x > 0.0 {
                breaks.push(k / x);
            }
        }
    }
    let scale = characteristic_scale(d);
    let layout = Layout {
        head,
        tail,
        breaks,
        span: (scale * 1e-12, scale * 1e8),
    };
    let m = tabulate(layout, |nodes, left_end| {
        parallel_nodes(nodes, left_end, |s, left| general_node(d, n, s, left))
    })?;
    let integral = m.normalization_integral();
    if (integral - 1.0).abs() > 1e-6 {
        return Err(Error::Consistency(format!(
            "generated function has normalization integral {integral}"
        )));
    }
    Ok(m)
}
