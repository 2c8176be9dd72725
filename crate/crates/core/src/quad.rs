//! Adaptive Gauss–Kronrod quadrature.
//!
//! The 21-point Kronrod rule with its embedded 10-point Gauss rule is applied
//! on a global work list: the interval with the largest error estimate is
//! bisected until the requested tolerance is met. Nodes never touch the
//! endpoints, so integrable algebraic endpoint singularities are handled by
//! repeated bisection towards the singular end.
//!
//! Improper integrals over `[a, ∞)` are mapped onto `(0, 1]` with
//! `x = a · y^(-k)`; choosing `k ≈ 1/(α - β)` for an integrand decaying like
//! `x^(β - α - 1)` makes the transformed integrand nearly constant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

/// Result of a quadrature.
#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += wg * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            value,
            error: f64::INFINITY,
        });
    }
    Ok((value, rescale_error(err, res_abs, res_asc)))
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Quad> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            abs_err: 0.0,
            intervals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "quadrature bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a > b {
        let q = integrate(f, b, a, opts)?;
        return Ok(Quad {
            value: -q.value,
            ..q
        });
    }

    let (v, e) = gk21(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    // error of segments too narrow to split further
    let mut frozen_err = 0.0;
    let mut frozen_val = 0.0;
    let mut count = 1;

    while total_err + frozen_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if count >= opts.max_intervals {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b || (seg.b - seg.a) < 4.0 * f64::EPSILON * seg.a.abs() {
            frozen_err += seg.err;
            frozen_val += seg.value;
            total_err -= seg.err;
            total -= seg.value;
            continue;
        }
        let (v1, e1) = gk21(&f, seg.a, mid)?;
        let (v2, e2) = gk21(&f, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
        count += 1;
    }

    // re-sum to avoid drift from incremental updates
    let value: f64 = heap.iter().map(|s| s.value).sum::<f64>() + frozen_val;
    let abs_err: f64 = heap.iter().map(|s| s.err).sum::<f64>() + frozen_err;
    let loose = 1e-7 * value.abs() + 1e3 * opts.abs_tol;
    if !value.is_finite() || abs_err > loose.max(opts.abs_tol.max(opts.rel_tol * value.abs())) {
        return Err(Error::Quadrature {
            a,
            b,
            value,
            error: abs_err,
        });
    }
    Ok(Quad {
        value,
        abs_err,
        intervals: count,
    })
}

/// Integrates over `[a, b]` splitting at every point of `breaks` inside the interval.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut lo = a;
    let mut sum = 0.0;
    for &x in pts.iter().chain(std::iter::once(&b)) {
        sum += integrate(&f, lo, x, opts)?.value;
        lo = x;
    }
    Ok(sum)
}

/// Integrates `f` over `[a, ∞)` for `a > 0` using the substitution `x = a·y^(-k)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, k: f64, opts: &QuadOptions) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lower bound of an infinite-range integral must be positive, got {a}"
        )));
    }
    let k = k.clamp(0.25, 32.0);
    let g = |y: f64| {
        let x = a * y.powf(-k);
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x) * k * x / y;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    Ok(integrate(g, 0.0, 1.0, opts)?.value)
}
