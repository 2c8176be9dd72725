//! CSV and JSON artifacts.
//!
//! CSV files are comma-separated with a header row and LF line endings; floats
//! use the shortest representation that round-trips.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::distribution::Distribution;
use crate::embedding::DistortionReport;
use crate::error::{Error, Result};
use crate::montecarlo::RatioReport;
use crate::orlicz::OrliczFunction;

/// Serializes `rows` with a header taken from their field names.
pub fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn with_header(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Columns `s, M`.
pub fn orlicz_grid_csv(m: &OrliczFunction, grid: &[f64]) -> Result<String> {
    with_header(&["s", "M"], grid.iter().map(|&s| vec![s, m.eval(s)]))
}

/// Columns `x, survival`.
pub fn survival_csv(d: &Distribution, grid: &[f64]) -> Result<String> {
    with_header(&["x", "survival"], grid.iter().map(|&x| vec![x, d.survival(x)]))
}

/// Single column `x`.
pub fn samples_csv(samples: &[f64]) -> Result<String> {
    with_header(&["x"], samples.iter().map(|&x| vec![x]))
}

/// Columns `n, estimate, dispersion, predicted, ratio`.
pub fn ratio_csv(report: &RatioReport) -> Result<String> {
    to_csv(&report.rows)
}

/// Columns `n, min_ratio, max_ratio, proxy`.
pub fn distortion_csv(report: &DistortionReport) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        min_ratio: f64,
        max_ratio: f64,
        proxy: f64,
    }
    to_csv(report.rows.iter().map(|r| Row {
        n: r.n,
        min_ratio: r.min_ratio,
        max_ratio: r.max_ratio,
        proxy: r.proxy,
    }))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::write(path, contents)?)
}
