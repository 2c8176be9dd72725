//! Subcommand implementations.

use std::path::Path;

use orlicz_core::correspondence::*;
use orlicz_core::distribution::{density_from_orlicz, distribution_from_orlicz_max, Distribution};
use orlicz_core::embedding::distortion_sweep;
use orlicz_core::montecarlo::{ratio_stability, standard_family, McConfig, Theorem};
use orlicz_core::orlicz::*;
use orlicz_core::{io, Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, MapKind, RunConfig, TheoremId};

pub struct Outcome {
    pub pass: bool,
    /// Printed to stdout.
    pub text: String,
}

impl Outcome {
    fn report<T: Serialize>(pass: bool, value: &T) -> Result<Self> {
        Ok(Self {
            pass,
            text: io::to_json(value)?,
        })
    }
}

const DEFAULT_NS: [usize; 3] = [10, 100, 1000];

/// Runs `cfg` and writes its artifacts; the config must already be resolved.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let command = cfg.validate()?;
    let out = cfg.out.as_deref();
    if let Some(dir) = out {
        // `out` and `workers` do not change results; leaving them out keeps
        // reruns byte-identical wherever and however they run
        let stored = RunConfig {
            out: None,
            workers: None,
            ..cfg.clone()
        };
        io::write_file(&dir.join("config.json"), &io::to_json(&stored)?)?;
    }
    let outcome = match command {
        Command::Norm => norm(cfg, out),
        Command::MakeDist => make_dist(cfg, out),
        Command::MakeOrlicz => make_orlicz(cfg, out),
        Command::Conditions => conditions(cfg, out),
        Command::Verify => verify(cfg, out),
        Command::Roundtrip => roundtrip(cfg, out),
        Command::Embed => embed(cfg, out),
    }?;
    if let Some(dir) = out {
        io::write_file(&dir.join("summary.json"), &outcome.text)?;
    }
    Ok(outcome)
}

fn write(out: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => io::write_file(&dir.join(name), contents),
        None => Ok(()),
    }
}

/// Prints `v` to 12 significant digits so exact answers read exactly.
fn short(v: f64) -> String {
    format!("{:.11e}", v).parse::<f64>().map_or_else(|_| v.to_string(), |r| r.to_string())
}

fn norm(cfg: &RunConfig, _out: Option<&Path>) -> Result<Outcome> {
    let m = cfg.orlicz()?;
    let x = cfg.x.as_deref().ok_or_else(|| Error::InvalidInput("config field `x` is required here".into()))?;
    let v = luxemburg_norm(&m, x)?;
    Ok(Outcome {
        pass: true,
        text: short(v),
    })
}

/// Log grid covering the bulk of `d`.
fn survival_grid(d: &Distribution, points: usize) -> Vec<f64> {
    let (lo, hi) = d.support();
    let a = if lo > 0.0 { lo } else { d.quantile(1e-6) };
    let b = if hi.is_finite() { hi } else { d.quantile(1.0 - 1e-9) };
    if b > a {
        log_grid(a, b, points)
    } else {
        vec![a]
    }
}

fn make_dist(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let m = cfg.orlicz()?;
    let d = match cfg.map {
        Some(MapKind::Max) => distribution_from_orlicz_max(&m)?,
        None | Some(MapKind::PNorm) => density_from_orlicz(&m, cfg.p()?)?,
        Some(other) => return Err(Error::InvalidInput(format!("make-dist supports map max or p-norm, not {other:?}"))),
    };
    write(out, "distribution.json", &io::to_json(d.spec())?)?;
    write(out, "survival.csv", &io::survival_csv(&d, &survival_grid(&d, cfg.grid.points))?)?;
    let (lo, hi) = d.support();
    Outcome::report(
        true,
        &json!({
            "support": [lo, if hi.is_finite() { json!(hi) } else { json!("inf") }],
            "atoms": d.atoms(),
            "tail_index": if d.tail_index().is_finite() { json!(d.tail_index()) } else { json!("inf") },
            "spec": d.spec(),
        }),
    )
}

fn make_orlicz(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let d = cfg.distribution()?;
    let m = match cfg.map.unwrap_or(if cfg.p.is_some() { MapKind::PNorm } else { MapKind::Max }) {
        MapKind::Max => orlicz_from_max(&d)?,
        MapKind::PNorm => orlicz_from_p_norm(&d, cfg.p()?)?,
        MapKind::QPower => orlicz_from_q_power(&d, cfg.p()?, cfg.q()?)?,
        MapKind::General => orlicz_from_general_n(&d, &cfg.generator()?)?,
    };
    let top = m.inverse(1.0)?;
    let grid = log_grid(top * 10f64.powf(-cfg.grid.decades), top * 100.0, cfg.grid.points);
    write(out, "orlicz.json", &io::to_json(&m)?)?;
    write(out, "grid.csv", &io::orlicz_grid_csv(&m, &grid)?)?;
    Outcome::report(
        true,
        &json!({
            "inverse_at_one": top,
            "normalization_integral": m.normalization_integral(),
            "normalized": m.is_normalized(),
            "kink": m.kink(),
        }),
    )
}

#[derive(Serialize)]
struct ConditionsSummary {
    q: f64,
    integral: ConditionReport,
    pointwise: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    limits: Option<LimitEstimates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limits_error: Option<String>,
    agree: bool,
    pass: bool,
}

fn conditions(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let m = cfg.orlicz()?;
    let q = cfg.q()?;
    let integral = check_integral_condition(&m, q, &cfg.grid)?;
    let pointwise = check_pointwise_condition(&m, q, &cfg.grid)?;
    let (limits, limits_error) = if integral.pass {
        match check_limits(&m, q) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let agree = integral.pass == pointwise.pass;
    let s = ConditionsSummary {
        q,
        pass: integral.pass && pointwise.pass,
        integral,
        pointwise,
        limits,
        limits_error,
        agree,
    };
    write(out, "conditions.json", &io::to_json(&s)?)?;
    let brief = json!({
        "q": q,
        "integral": { "pass": s.integral.pass, "constant": s.integral.constant, "argmax": s.integral.argmax },
        "pointwise": { "pass": s.pointwise.pass, "constant": s.pointwise.constant, "c": s.pointwise.c },
        "limits": s.limits,
        "agree": s.agree,
        "pass": s.pass,
    });
    Outcome::report(s.pass, &brief)
}

fn mc_config(cfg: &RunConfig) -> Result<McConfig> {
    let mut c = McConfig::new(cfg.seed()?);
    if let Some(r) = cfg.replicates {
        c = c.with_replicates(r);
    }
    Ok(c)
}

fn verify(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let id = cfg
        .theorem
        .ok_or_else(|| Error::InvalidInput("config field `theorem` is required here".into()))?;
    let theorem = match id {
        TheoremId::Max => Theorem::Max {
            dist: cfg.distribution()?,
        },
        TheoremId::Pnorm => Theorem::Pnorm {
            dist: cfg.distribution()?,
            p: cfg.p()?,
        },
        TheoremId::LqGeneration => Theorem::LqGeneration {
            q: cfg.q()?,
            p: cfg.p()?,
        },
        TheoremId::Tensor => Theorem::Tensor {
            m: cfg.orlicz()?,
            p: cfg.p()?,
            q: cfg.q()?,
        },
    };
    let bound = cfg.tolerances.spread.unwrap_or(match id {
        TheoremId::Tensor => 3.0,
        _ => 2.0,
    });
    let ns = cfg.ns.clone().unwrap_or_else(|| DEFAULT_NS.to_vec());
    let seed = cfg.seed()?;
    let family = standard_family(&theorem, &ns, seed);
    let report = ratio_stability(&theorem, &family, &mc_config(cfg)?)?.with_bound(bound);
    write(out, "ratio.csv", &io::ratio_csv(&report)?)?;
    write(out, "ratio.json", &io::to_json(&report)?)?;
    Outcome::report(report.pass == Some(true), &report)
}

#[derive(Serialize)]
struct RoundtripSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    m_to_m: Option<DeviationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<DensityReport>,
    pass: bool,
}

fn roundtrip(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let p = cfg.p()?;
    if cfg.orlicz.is_none() && cfg.distribution.is_none() {
        return Err(Error::InvalidInput("roundtrip needs `orlicz`, `distribution` or both".into()));
    }
    let points = cfg.grid.points;
    let m_to_m = cfg.orlicz.as_ref().map(|_| roundtrip_m_to_m(&cfg.orlicz()?, p, points)).transpose()?;
    let density = cfg
        .distribution
        .as_ref()
        .map(|_| density_from_mxp(&cfg.distribution()?, p, points))
        .transpose()?;
    let pass = m_to_m.as_ref().is_none_or(|r| r.max_rel_dev <= cfg.tolerances.roundtrip)
        && density.as_ref().is_none_or(|r| r.max_rel_err <= cfg.tolerances.density);
    let s = RoundtripSummary { m_to_m, density, pass };
    write(out, "roundtrip.json", &io::to_json(&s)?)?;
    let brief = json!({
        "m_to_m": s.m_to_m.as_ref().map(|r| json!({ "max_rel_dev": r.max_rel_dev, "argmax": r.argmax })),
        "density": s.density.as_ref().map(|r| json!({ "max_rel_err": r.max_rel_err, "argmax": r.argmax })),
        "pass": s.pass,
    });
    Outcome::report(pass, &brief)
}

fn embed(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let m = cfg.orlicz()?;
    let q = cfg.q()?;
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    let report = distortion_sweep(&m, q, &ns, cfg.per_n.unwrap_or(20), &mc_config(cfg)?)?;
    write(out, "distortion.csv", &io::distortion_csv(&report)?)?;
    let pass = report.stability <= cfg.tolerances.stability;
    let mut v: Value = serde_json::to_value(&report)?;
    v["bound"] = json!(cfg.tolerances.stability);
    v["pass"] = json!(pass);
    write(out, "distortion.json", &io::to_json(&v)?)?;
    Outcome::report(pass, &v)
}
