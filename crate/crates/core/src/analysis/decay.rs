//! Power-law fits and the Fourier-splitting radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::io::TimeSeries;
use crate::lp::FilterBank;

/// Least-squares slope of `log norm` against `log(1 + t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub norm_label: String,
    pub window: [f64; 2],
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 20;

pub fn fit_decay_exponent(series: &TimeSeries, norm_label: &str, window: [f64; 2]) -> Result<DecayFit> {
    let col = series
        .column(norm_label)
        .ok_or_else(|| Error::Fit(format!("no column named {norm_label}")))?;
    let [lo, hi] = window;
    if !(lo <= hi) {
        return Err(Error::Fit(format!("empty window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(col) {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Fit(format!("{norm_label} = {v} at t = {t} is not positive")));
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!("{n} samples in window, at least {MIN_FIT_SAMPLES} needed")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("window spans a single time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (nf - 2.0) / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(DecayFit { norm_label: norm_label.to_string(), window, exponent: slope, stderr, r_squared, samples: n })
}

/// `r(t)` with `2^{r(t)} = (1 + t)^{-1/2}`.
pub fn fourier_split_radius(t: f64) -> f64 {
    -0.5 * (1.0 + t).log2()
}

/// `Σ_{j ≤ r} ‖Δ_j f‖`.
pub fn low_frequency_mass(bank: &FilterBank, f: &SpectralField, r: f64) -> Result<f64> {
    let e = bank.block_energies(f)?;
    Ok(e.iter()
        .enumerate()
        .filter(|(jj, _)| (bank.j_min + *jj as i32) as f64 <= r)
        .map(|(_, v)| v.max(0.0).sqrt())
        .sum())
}
