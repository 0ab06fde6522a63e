//! Report files: time series CSV, decay verdicts, manifest, norm reports and
//! dispersion tables.

use std::path::Path;

use serde::Serialize;

use super::{RunConfig, TimeSeries};
use crate::analysis::{DecayFit, LinearSymbol};
use crate::error::{Error, Result};
use crate::lp::{BesovSpec, NormParts};

/// One fitted exponent compared against the predicted exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub label: String,
    pub window: [f64; 2],
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    pub theory_exponent: f64,
    pub verdict: String,
}

impl DecayReport {
    pub fn new(fit: &DecayFit, theory_exponent: f64, tolerance: f64) -> Self {
        let pass = (fit.exponent - theory_exponent).abs() <= tolerance;
        Self {
            label: fit.norm_label.clone(),
            window: fit.window,
            exponent: fit.exponent,
            stderr: fit.stderr,
            r2: fit.r_squared,
            theory_exponent,
            verdict: if pass { "pass" } else { "fail" }.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    config_hash: String,
    config: String,
    package: &'static str,
    version: &'static str,
    grid: &'a str,
    case: &'a str,
    q: &'a str,
    nonlinear: bool,
    samples: usize,
    wall_time_seconds: f64,
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Serialize(e.to_string()))
}

/// Writes `timeseries.csv`, `decay.json` and `manifest.json` into `dir`.
pub fn emit_reports(
    series: &TimeSeries,
    fits: &[DecayReport],
    config: &RunConfig,
    wall_time_seconds: f64,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("timeseries.csv"), &series.to_csv())?;
    write(&dir.join("decay.json"), &json(&fits)?)?;
    let manifest = Manifest {
        config_hash: config.hash()?,
        config: config.to_toml()?,
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        grid: &series.metadata.grid,
        case: &series.metadata.case,
        q: &series.metadata.q,
        nonlinear: series.metadata.nonlinear,
        samples: series.len(),
        wall_time_seconds,
    };
    write(&dir.join("manifest.json"), &json(&manifest)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub field_id: String,
    pub spec: BesovSpec,
    pub low: f64,
    pub high: f64,
    pub total: f64,
    pub tail_mass: f64,
}

impl NormReport {
    pub fn new(field_id: impl Into<String>, spec: BesovSpec, parts: NormParts) -> Self {
        Self {
            field_id: field_id.into(),
            spec,
            low: parts.low,
            high: parts.high,
            total: parts.total,
            tail_mass: parts.tail_mass,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        json(self)
    }
}

/// `xi_mag,re_lambda1,im_lambda1,re_lambda2,im_lambda2` rows, slow branch first.
pub fn dispersion_csv(symbols: &[LinearSymbol]) -> String {
    let mut out = String::from("xi_mag,re_lambda1,im_lambda1,re_lambda2,im_lambda2\n");
    for s in symbols {
        let [a, b] = s.eigenvalues;
        out.push_str(&format!("{:?},{:?},{:?},{:?},{:?}\n", s.xi_mag, a.re, a.im, b.re, b.im));
    }
    out
}
