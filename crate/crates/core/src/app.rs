//! Subcommand orchestration shared by the binary and the tests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{decay_label, fit_decay_exponent, theory_exponent};
use crate::error::Result;
use crate::io::{emit_reports, write_field, DecayReport, RunConfig, TimeSeries};
use crate::solver::{run, Case, RunOutput};

/// Fits every configured decay norm; Case II carries no decay claim.
pub fn decay_reports(config: &RunConfig, series: &TimeSeries) -> Result<Vec<DecayReport>> {
    if matches!(config.model.case, Case::II | Case::Custom) {
        return Ok(Vec::new());
    }
    let window = config.decay_window();
    config
        .decay
        .s0
        .iter()
        .map(|&s0| {
            let fit = fit_decay_exponent(series, &decay_label(s0), window)?;
            Ok(DecayReport::new(&fit, theory_exponent(s0), config.decay.tolerance))
        })
        .collect()
}

/// Runs the experiment and writes reports and snapshots into `dir`.
pub fn simulate_to_dir(config: &RunConfig, dir: &Path, with_fits: bool) -> Result<(RunOutput, Vec<DecayReport>)> {
    let start = Instant::now();
    let out = run(config)?;
    let fits = if with_fits { decay_reports(config, &out.series)? } else { Vec::new() };
    emit_reports(&out.series, &fits, config, start.elapsed().as_secs_f64(), dir)?;
    for s in &out.snapshots {
        write_field(&s.u, snapshot_path(dir, "u", s.t))?;
        write_field(&s.tau, snapshot_path(dir, "tau", s.t))?;
    }
    Ok((out, fits))
}

pub fn snapshot_path(dir: &Path, name: &str, t: f64) -> PathBuf {
    dir.join(format!("{name}_t{t}.ovf1"))
}
