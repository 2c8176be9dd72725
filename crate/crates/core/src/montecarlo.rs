//! Monte Carlo estimates of expected norms of random vectors and matrices.
//!
//! Replicates are grouped in fixed blocks of [`BLOCK`]; block `b` of an
//! estimate with tag `t` draws from the ChaCha8 stream `(seed, t, b)`. Blocks
//! run in parallel and are reduced in block order, so results do not depend on
//! the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{orlicz_from_max, orlicz_from_p_norm};
use crate::distribution::{density_from_orlicz, pareto_q, Distribution};
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::orlicz::{lp_norm, luxemburg_norm, nested_norm, OrliczFunction};
use crate::quad::{integrate_to_infinity, integrate_with_breaks, QuadOptions};

/// Replicates per random stream.
pub const BLOCK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Aggregation {
    Mean,
    MedianOfMeans { blocks: usize },
}

impl Aggregation {
    /// `⌈2 ln(1/δ)⌉` groups.
    pub fn median_of_means(delta: f64) -> Self {
        Self::MedianOfMeans {
            blocks: ((2.0 * (1.0 / delta).ln()).ceil() as usize).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub replicates: usize,
    /// `None` picks median-of-means for tail index ≤ 2 and the mean otherwise.
    #[serde(default)]
    pub aggregation: Option<Aggregation>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.01
}

impl McConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            replicates: 100_000,
            aggregation: None,
            delta: default_delta(),
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = Some(aggregation);
        self
    }

    /// Same settings with an independent seed derived from `key`.
    pub fn derive(&self, key: u64) -> Self {
        Self {
            seed: mix(self.seed ^ mix(key)),
            ..self.clone()
        }
    }

    fn resolve(&self, tail_index: f64) -> Aggregation {
        self.aggregation.unwrap_or(if tail_index <= 2.0 {
            Aggregation::median_of_means(self.delta)
        } else {
            Aggregation::Mean
        })
    }
}

/// SplitMix64 finalizer.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Standard error for the mean; inter-group median absolute deviation for
    /// median-of-means.
    pub dispersion: f64,
    pub samples: usize,
    pub seed: u64,
    pub aggregation: Aggregation,
}

pub(crate) fn stream(seed: u64, tag: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag.rotate_left(40) ^ block);
    rng
}

/// Runs `replicates` draws of `draw` and aggregates them.
pub(crate) fn simulate<F>(cfg: &McConfig, tag: u64, tail_index: f64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n = cfg.replicates;
    if n < 2 {
        return invalid("need at least 2 replicates");
    }
    let aggregation = cfg.resolve(tail_index);
    if let Aggregation::MedianOfMeans { blocks } = aggregation {
        if blocks == 0 || blocks > n {
            return invalid(format!("{blocks} groups for {n} replicates"));
        }
    }
    let blocks = n.div_ceil(BLOCK);
    let values: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(cfg.seed, tag, b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            (0..len).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>()
        .concat();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Consistency(format!("non-finite replicate {bad}")));
    }
    let (estimate, dispersion) = aggregate(&values, aggregation);
    Ok(McEstimate {
        estimate,
        dispersion,
        samples: n,
        seed: cfg.seed,
        aggregation,
    })
}

/// Mean shifted by the first value, so constant inputs average exactly.
fn shifted_mean(v: &[f64]) -> f64 {
    let v0 = v[0];
    v0 + v.iter().map(|x| x - v0).sum::<f64>() / v.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn aggregate(values: &[f64], aggregation: Aggregation) -> (f64, f64) {
    let n = values.len();
    match aggregation {
        Aggregation::Mean => {
            let mean = shifted_mean(values);
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (mean, (var / n as f64).sqrt())
        }
        Aggregation::MedianOfMeans { blocks } => {
            let mut means: Vec<f64> = (0..blocks)
                .map(|g| shifted_mean(&values[g * n / blocks..(g + 1) * n / blocks]))
                .collect();
            let center = median(&mut means);
            let mut dev: Vec<f64> = means.iter().map(|m| (m - center).abs()).collect();
            (center, median(&mut dev))
        }
    }
}

const TAG_MAX: u64 = 1;
const TAG_PNORM: u64 = 2;
const TAG_TENSOR: u64 = 3;
pub(crate) const TAG_PSI: u64 = 4;
const TAG_MATRIX: u64 = 5;

fn check_vector(a: &[f64]) -> Result<()> {
    if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
        return invalid("coefficient vector must be nonempty and finite");
    }
    Ok(())
}

fn check_integrable(d: &Distribution) -> Result<()> {
    if d.tail_index() <= 1.0 {
        return Err(Error::NotIntegrable(format!("tail index {}", d.tail_index())));
    }
    Ok(())
}

/// `E max_i |a_i X_i|` over i.i.d. copies of `X`.
pub fn expect_max(d: &Distribution, a: &[f64], cfg: &McConfig) -> Result<McEstimate> {
    check_vector(a)?;
    check_integrable(d)?;
    simulate(cfg, TAG_MAX, d.tail_index(), |rng| {
        a.iter().map(|&ai| (ai * d.sample(rng)).abs()).fold(0.0, f64::max)
    })
}

/// `E ‖(a_i X_i)‖_p`; `p = ∞` is the maximum.
pub fn expect_pnorm(d: &Distribution, a: &[f64], p: f64, cfg: &McConfig) -> Result<McEstimate> {
    check_vector(a)?;
    check_integrable(d)?;
    if !(p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    simulate(cfg, TAG_PNORM, d.tail_index(), |rng| {
        let v: Vec<f64> = a.iter().map(|&ai| ai * d.sample(rng)).collect();
        lp_norm(&v, p)
    })
}

/// `E_ξ E_X ‖(a_ij ξ_i X_j)‖_p` with independent vectors `ξ` (rows) and `X` (columns).
pub fn expect_tensor_pnorm(
    d_xi: &Distribution,
    d_x: &Distribution,
    a: &Matrix,
    p: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_integrable(d_xi)?;
    check_integrable(d_x)?;
    if a.rows() == 0 || a.cols() == 0 {
        return invalid("empty matrix");
    }
    if !(p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    let tail = d_xi.tail_index().min(d_x.tail_index());
    simulate(cfg, TAG_TENSOR, tail, |rng| {
        let xi: Vec<f64> = (0..a.rows()).map(|_| d_xi.sample(rng)).collect();
        let x: Vec<f64> = (0..a.cols()).map(|_| d_x.sample(rng)).collect();
        let v: Vec<f64> = a
            .row_iter()
            .zip(&xi)
            .flat_map(|(row, &s)| row.iter().zip(&x).map(move |(aij, xj)| aij * s * xj))
            .collect();
        lp_norm(&v, p)
    })
}

/// Exact `E max_i |a_i X_i| = ∫₀^∞ 1 − Π_i (1 − S(x/|a_i|)) dx`.
pub fn max_oracle(d: &Distribution, a: &[f64]) -> Result<f64> {
    check_vector(a)?;
    check_integrable(d)?;
    let scales: Vec<f64> = a.iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
    if scales.is_empty() {
        return Ok(0.0);
    }
    let tail_of_max = |x: f64| -> f64 {
        let log_none: f64 = scales.iter().map(|&c| (-d.survival(x / c)).ln_1p()).sum();
        -log_none.exp_m1()
    };
    let mut breaks: Vec<f64> = Vec::new();
    let mut pts = d.breaks();
    pts.extend(d.atoms().iter().map(|a| a.at));
    for &c in &scales {
        breaks.extend(pts.iter().filter(|x| x.is_finite()).map(|x| x * c));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let (lo, hi) = d.support();
    let cmax = scales.iter().copied().fold(0.0, f64::max);
    if hi.is_finite() {
        return integrate_with_breaks(tail_of_max, 0.0, hi * cmax, &breaks, &opts);
    }
    let cut = lo.max(breaks.last().copied().unwrap_or(0.0)).max(1e-300) * cmax.max(1.0) * 2.0;
    let head = integrate_with_breaks(tail_of_max, 0.0, cut, &breaks, &opts)?;
    let k = 1.0 / (d.tail_index() - 1.0);
    Ok(head + integrate_to_infinity(tail_of_max, cut, k, &opts)?)
}

/// Which norm equivalence a ratio sweep exercises.
#[derive(Clone, Debug)]
pub enum Theorem {
    /// `E max |a_i X_i|` against `‖a‖_{M_X}`.
    Max { dist: Distribution },
    /// `E ‖(a_i X_i)‖_p` against `‖a‖_{M_{X,p}}`.
    Pnorm { dist: Distribution, p: f64 },
    /// `E ‖(a_j ξ_j)‖_p` for Pareto-type `ξ` against `‖a‖_q`.
    LqGeneration { q: f64, p: f64 },
    /// `E ‖(a_ij ξ_i X_j)‖_p` against `‖(‖row_i‖_M)_i‖_q`, with `X` generated
    /// from `M` and `ξ` Pareto-type of index `q`.
    Tensor { m: OrliczFunction, p: f64, q: f64 },
}

impl Theorem {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Max { .. } => "max",
            Self::Pnorm { .. } => "pnorm",
            Self::LqGeneration { .. } => "lq-generation",
            Self::Tensor { .. } => "tensor",
        }
    }
}

/// Coefficients for one point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl Coefficients {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Vector(v) => v.len(),
            Self::Matrix(m) => m.rows(),
        }
    }
}

/// All-ones vectors for the vector theorems, seeded standard normal matrices
/// for the tensor theorem.
pub fn standard_family(theorem: &Theorem, ns: &[usize], seed: u64) -> Vec<Coefficients> {
    ns.iter()
        .map(|&n| match theorem {
            Theorem::Tensor { .. } => {
                Coefficients::Matrix(Matrix::standard_normal(n, &mut stream(seed, TAG_MATRIX, n as u64)))
            }
            _ => Coefficients::Vector(vec![1.0; n]),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub estimate: f64,
    pub dispersion: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub theorem: String,
    pub rows: Vec<RatioRow>,
    /// Largest ratio over smallest.
    pub spread: f64,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
}

impl RatioReport {
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self.pass = Some(self.spread <= bound);
        self
    }
}

/// Empirical expectation over predicted norm for each member of `family`.
///
/// Each member gets its own seed derived from its position in the family.
pub fn ratio_stability(theorem: &Theorem, family: &[Coefficients], cfg: &McConfig) -> Result<RatioReport> {
    let mut rows = Vec::with_capacity(family.len());
    match theorem {
        Theorem::Max { dist } => {
            let m = orlicz_from_max(dist)?;
            for (k, c) in family.iter().enumerate() {
                let a = vector(c)?;
                let est = expect_max(dist, a, &cfg.derive(k as u64))?;
                rows.push(row(a.len(), est, luxemburg_norm(&m, a)?));
            }
        }
        Theorem::Pnorm { dist, p } => {
            let m = orlicz_from_p_norm(dist, *p)?;
            for (k, c) in family.iter().enumerate() {
                let a = vector(c)?;
                let est = expect_pnorm(dist, a, *p, &cfg.derive(k as u64))?;
                rows.push(row(a.len(), est, luxemburg_norm(&m, a)?));
            }
        }
        Theorem::LqGeneration { q, p } => {
            let xi = pareto_q(*q)?;
            for (k, c) in family.iter().enumerate() {
                let a = vector(c)?;
                let est = expect_pnorm(&xi, a, *p, &cfg.derive(k as u64))?;
                rows.push(row(a.len(), est, lp_norm(a, *q)));
            }
        }
        Theorem::Tensor { m, p, q } => {
            if !(*q > 1.0 && q < p) {
                return invalid(format!("need 1 < q < p, got q = {q}, p = {p}"));
            }
            let xi = pareto_q(*q)?;
            let x = density_from_orlicz(m, *p)?;
            for (k, c) in family.iter().enumerate() {
                let Coefficients::Matrix(a) = c else {
                    return invalid("tensor sweep needs matrices");
                };
                let est = expect_tensor_pnorm(&xi, &x, a, *p, &cfg.derive(k as u64))?;
                rows.push(row(a.rows(), est, nested_norm(m, a.row_iter(), *q)?));
            }
        }
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::Consistency(format!("ratios outside (0, ∞): [{lo}, {hi}]")));
    }
    Ok(RatioReport {
        theorem: theorem.id().into(),
        rows,
        spread: hi / lo,
        bound: None,
        pass: None,
    })
}

fn vector(c: &Coefficients) -> Result<&[f64]> {
    match c {
        Coefficients::Vector(v) => Ok(v),
        Coefficients::Matrix(_) => invalid("vector sweep needs vectors"),
    }
}

fn row(n: usize, est: McEstimate, predicted: f64) -> RatioRow {
    RatioRow {
        n,
        estimate: est.estimate,
        dispersion: est.dispersion,
        predicted,
        ratio: est.estimate / predicted,
    }
}

/// Uniform in `{−1, 1}`.
pub(crate) fn rademacher<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
