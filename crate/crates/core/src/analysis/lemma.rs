//! Discrete check of `½ d/dt f_j² + h_j² = 0` along a linear run.

use serde::Serialize;

use super::energy::{BlockMoments, EnergyFunctional};
use crate::error::{Error, Result};
use crate::lp::FilterBank;
use crate::solver::State;

/// States sampled from a run together with its nonlinearity flag.
#[derive(Debug, Clone)]
pub struct RecordedRun {
    pub states: Vec<State>,
    pub nonlinear: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub j: i32,
    /// `max |½Δ(f_j²)/Δt + h_j²| / h_j²` over interior samples; `None` when all skipped.
    pub max_normalized: Option<f64>,
    pub samples: usize,
    pub skipped: usize,
}

/// Centered-difference residual of the energy identity on interior samples.
pub fn lemma_residual(run: &RecordedRun, bank: &FilterBank, ef: &EnergyFunctional, j: i32) -> Result<ResidualReport> {
    if run.nonlinear {
        return Err(Error::Lemma("the recorded run had nonlinear terms active".into()));
    }
    if run.states.len() < 3 {
        return Err(Error::Lemma("at least three samples are needed".into()));
    }
    if !ef.contains(j) {
        return Err(Error::Lemma(format!("j = {j} lies outside the {:?} band", ef.band)));
    }
    let mut f2 = Vec::with_capacity(run.states.len());
    let mut h2 = Vec::with_capacity(run.states.len());
    for s in &run.states {
        let m = BlockMoments::compute(bank, &s.u, &s.tau)?;
        if j < bank.j_min || j > bank.j_max {
            return Err(Error::DyadicRange { j, j_min: bank.j_min, j_max: bank.j_max });
        }
        let (f, h) = ef.squares(m.at(j))?;
        f2.push(f);
        h2.push(h);
    }
    let mut worst: Option<f64> = None;
    let mut samples = 0;
    let mut skipped = 0;
    for i in 1..run.states.len() - 1 {
        let dt = run.states[i + 1].t - run.states[i - 1].t;
        let r = (0.5 * (f2[i + 1] - f2[i - 1]) / dt + h2[i]).abs();
        if h2[i] == 0.0 {
            skipped += 1;
            continue;
        }
        samples += 1;
        let v = r / h2[i].abs();
        worst = Some(worst.map_or(v, |w| w.max(v)));
    }
    Ok(ResidualReport { j, max_normalized: worst, samples, skipped })
}
