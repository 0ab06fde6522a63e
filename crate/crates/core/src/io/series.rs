//! Sampled time series with named columns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance recorded alongside a series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub config_hash: String,
    pub grid: String,
    pub case: String,
    pub q: String,
    pub nonlinear: bool,
}

/// Increasing sample times and equally long named columns, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
    pub metadata: SeriesMetadata,
}

impl TimeSeries {
    pub fn new(labels: &[String]) -> Self {
        Self {
            times: Vec::new(),
            columns: labels.iter().map(|l| (l.clone(), Vec::new())).collect(),
            metadata: SeriesMetadata::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(l, _)| l.as_str())
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    /// Appends one row; `values` follow the column order.
    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} values for {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidParameter(format!("sample time {t} does not exceed {last}")));
            }
        }
        self.times.push(t);
        for ((_, col), v) in self.columns.iter_mut().zip(values) {
            col.push(*v);
        }
        Ok(())
    }

    /// Builds a series from explicit columns, checking the invariants.
    pub fn from_columns(times: Vec<f64>, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("sample times must increase".into()));
        }
        if let Some((l, _)) = columns.iter().find(|(_, c)| c.len() != times.len()) {
            return Err(Error::InvalidParameter(format!("column {l} length differs from times")));
        }
        Ok(Self { times, columns, metadata: SeriesMetadata::default() })
    }

    /// `t,<label>,...` header then one row per sample, shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (l, _) in &self.columns {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t:?}"));
            for (_, c) in &self.columns {
                out.push_str(&format!(",{:?}", c[i]));
            }
            out.push('\n');
        }
        out
    }
}
