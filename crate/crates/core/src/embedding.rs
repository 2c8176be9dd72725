//! Empirical distortion of the map sending a matrix `A` to the random variable
//! `Σ a_ij r_ij ξ_i X_j`, with Rademacher signs `r`, Pareto-type `ξ` and `X`
//! generated from `M` with `p = 2`.

use serde::{Deserialize, Serialize};

use crate::distribution::{density_from_orlicz, pareto_q, Distribution};
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::montecarlo::{mix, rademacher, simulate, stream, McConfig, McEstimate, TAG_PSI};
use crate::orlicz::{log_grid, nested_norm, OrliczFunction};

const TAG_ENSEMBLE: u64 = 6;

/// Checks `M''' ≤ 0` on the smooth pieces of `M`; kinks are exempt and affine
/// pieces trivially pass.
pub fn check_two_concave(m: &OrliczFunction) -> Result<()> {
    for piece in m.pieces() {
        if piece.branch.is_affine() {
            continue;
        }
        let lo = piece.domain.lo;
        let hi = piece.domain.hi;
        let (a, b) = match (lo > 0.0, hi.is_finite()) {
            (true, true) => (lo, hi),
            (false, true) => (hi * 1e-8, hi),
            (true, false) => (lo, lo * 1e8),
            (false, false) => (1e-8, 1e8),
        };
        for t in log_grid(a, b, 257) {
            let third = piece.branch.deriv(3, t);
            let second = piece.branch.deriv(2, t);
            if third > 1e-9 * second.abs() / t {
                return Err(Error::NotTwoConcave { t, value: third });
            }
        }
    }
    Ok(())
}

/// The pair of laws used by the embedding.
#[derive(Clone, Debug)]
pub struct EmbeddingLaws {
    pub xi: Distribution,
    pub x: Distribution,
}

impl EmbeddingLaws {
    pub fn new(m: &OrliczFunction, q: f64) -> Result<Self> {
        if !(q > 1.0 && q < 2.0) {
            return invalid(format!("need 1 < q < 2, got {q}"));
        }
        check_two_concave(m)?;
        Ok(Self {
            xi: pareto_q(q)?,
            x: density_from_orlicz(m, 2.0)?,
        })
    }
}

/// `E |Σ a_ij r_ij ξ_i X_j|`.
pub fn psi_l1_norm(a: &Matrix, m: &OrliczFunction, q: f64, cfg: &McConfig) -> Result<McEstimate> {
    psi_l1_norm_with(a, &EmbeddingLaws::new(m, q)?, cfg)
}

/// As [`psi_l1_norm`] with the laws built once.
pub fn psi_l1_norm_with(a: &Matrix, laws: &EmbeddingLaws, cfg: &McConfig) -> Result<McEstimate> {
    if a.rows() == 0 || a.cols() == 0 {
        return invalid("empty matrix");
    }
    let tail = laws.xi.tail_index().min(laws.x.tail_index());
    simulate(cfg, TAG_PSI, tail, |rng| {
        let xi: Vec<f64> = (0..a.rows()).map(|_| laws.xi.sample(rng)).collect();
        let x: Vec<f64> = (0..a.cols()).map(|_| laws.x.sample(rng)).collect();
        let mut sum = 0.0;
        for (row, s) in a.row_iter().zip(&xi) {
            for (aij, xj) in row.iter().zip(&x) {
                sum += rademacher(rng) * aij * s * xj;
            }
        }
        sum.abs()
    })
}

/// Matrices used at dimension `n`: identity, the all-ones rank-one matrix, a
/// single entry at the corner, then standard normal matrices.
pub fn matrix_ensemble(n: usize, count: usize, seed: u64) -> Vec<Matrix> {
    let ones = vec![1.0; n];
    let mut out = vec![
        Matrix::identity(n),
        Matrix::rank_one(&ones, &ones),
        Matrix::single_entry(n, 0, 0, 1.0),
    ];
    out.truncate(count);
    let mut rng = stream(seed, TAG_ENSEMBLE, n as u64);
    while out.len() < count {
        out.push(Matrix::standard_normal(n, &mut rng));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub n: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub matrices: usize,
    /// `max_ratio / min_ratio`.
    pub proxy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub rows: Vec<DistortionRow>,
    /// Largest proxy over all dimensions.
    pub stability: f64,
}

/// Ratio `E|Σ a_ij r_ij ξ_i X_j| / ‖(‖row_i‖_M)_i‖_q` over [`matrix_ensemble`]
/// for each dimension in `ns`.
pub fn distortion_sweep(
    m: &OrliczFunction,
    q: f64,
    ns: &[usize],
    per_n: usize,
    cfg: &McConfig,
) -> Result<DistortionReport> {
    if per_n == 0 {
        return invalid("need at least one matrix per dimension");
    }
    let laws = EmbeddingLaws::new(m, q)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return invalid("dimension must be positive");
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (k, a) in matrix_ensemble(n, per_n, cfg.seed).iter().enumerate() {
            let est = psi_l1_norm_with(a, &laws, &cfg.derive(mix(n as u64) ^ k as u64))?;
            let ratio = est.estimate / nested_norm(m, a.row_iter(), q)?;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::Consistency(format!("ratios outside (0, ∞) at n = {n}")));
        }
        rows.push(DistortionRow {
            n,
            min_ratio: lo,
            max_ratio: hi,
            matrices: per_n,
            proxy: hi / lo,
        });
    }
    let stability = rows.iter().map(|r| r.proxy).fold(1.0, f64::max);
    Ok(DistortionReport { rows, stability })
}
