//! Time integration to `t_final` with sampled norms, energy functionals,
//! time accumulators and field snapshots.

use serde::Serialize;

use super::{make_initial_data, State, Stepper};
use crate::analysis::{
    decay_label, decay_norms, initial_norms, integral_norms, sup_norms, BlockMoments, EnergyPlan, NormDecl,
};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::io::{RunConfig, SeriesMetadata, TimeSeries};
use crate::lp::{build_filter_bank, FilterBank};

/// Sharpness of the dyadic profile used for every recorded norm.
pub const BANK_SHARPNESS: f64 = 1.0;

/// Deep copy of the state at one sampled time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: SpectralField,
    pub tau: SpectralField,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    pub plan: Option<EnergyPlan>,
    /// Initial-data smallness `‖(u₀, τ₀)‖_{ℰ₀}` after any rescaling.
    pub e0: f64,
    pub initial: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Accumulators {
    sup: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

/// Generates the configured initial data, rescaled to `init.e0` unless an
/// explicit amplitude was given.
pub fn initial_state(config: &RunConfig, bank: &FilterBank) -> Result<(State, f64)> {
    let (mut u, mut tau) = make_initial_data(config.grid, &config.init.spec())?;
    let e0_of = |u: &SpectralField, tau: &SpectralField| -> Result<f64> {
        let m = BlockMoments::compute(bank, u, tau)?;
        Ok(initial_norms(config.model.case, config.grid.d).iter().map(|n| n.evaluate(bank, &m)).sum())
    };
    let mut e0 = e0_of(&u, &tau)?;
    if config.init.amplitude.is_none() && e0 > 0.0 {
        let factor = config.init.e0 / e0;
        u.scale(factor);
        tau.scale(factor);
        e0 = e0_of(&u, &tau)?;
    }
    Ok((State { u, tau, t: 0.0 }, e0))
}

/// Runs the configured experiment from generated initial data.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let bank = build_filter_bank(config.grid, BANK_SHARPNESS)?;
    let (state, e0) = initial_state(config, &bank)?;
    run_from(config, &bank, state, e0)
}

/// Runs the configured experiment from a given initial state.
pub fn run_from(config: &RunConfig, bank: &FilterBank, initial: State, e0: f64) -> Result<RunOutput> {
    let grid = config.grid;
    let d = grid.d;
    let case = config.model.case;
    let ctx = grid.context();
    let mut stepper = Stepper::new(ctx, config.model, config.q.clone(), config.time.dt)?;
    stepper.cfl = config.time.cfl;
    stepper.nonlinear = config.nonlinear;

    let plan = if config.model.mu == 1.0 && case != super::Case::Custom {
        Some(EnergyPlan::search(&config.model, bank)?)
    } else {
        None
    };
    let sup = sup_norms(case, d, 0);
    let int = integral_norms(case, d, 0);
    let lyap_norms: Vec<NormDecl> = plan.as_ref().map(|p| sup_norms(case, d, p.j0)).unwrap_or_default();
    let decays: Vec<(f64, NormDecl, NormDecl)> = config
        .decay
        .s0
        .iter()
        .filter_map(|&s0| decay_norms(case, d, s0).map(|(u, t)| (s0, u, t)))
        .collect();

    let mut labels: Vec<String> = vec!["u_l2".into(), "tau_l2".into(), "max_u".into()];
    if plan.is_some() {
        labels.push("lyapunov".into());
        labels.push("lyapunov_norm".into());
    }
    labels.extend(sup.iter().chain(int.iter()).map(|n| n.label.clone()));
    labels.push("ell_T".into());
    labels.push("h_T".into());
    for (s0, u, t) in &decays {
        labels.push(decay_label(*s0));
        labels.push(u.label.clone());
        labels.push(t.label.clone());
    }
    labels.extend(config.norms.iter().map(|n| n.label.clone()));
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
        return Err(Error::config("norms", format!("duplicate column label {dup}")));
    }

    let mut series = TimeSeries::new(&labels);
    series.metadata = SeriesMetadata {
        config_hash: config.hash()?,
        grid: format!("d={} n={} L={}", grid.d, grid.n, grid.box_length),
        case: case.as_str().into(),
        q: config.q.name().into(),
        nonlinear: config.nonlinear,
    };

    let mut acc = Accumulators { sup: 0.0, integral: 0.0, last: None };
    let mut sample = |s: &State, series: &mut TimeSeries| -> Result<()> {
        let m = BlockMoments::compute(bank, &s.u, &s.tau)?;
        let phys = s.u.to_physical();
        let max_u = (0..grid.len())
            .map(|p| phys.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let mut row = vec![s.u.norm(), s.tau.norm(), max_u];
        if let Some(p) = &plan {
            row.push(p.lyapunov(&m)?);
            row.push(lyap_norms.iter().map(|n| n.evaluate(bank, &m)).sum());
        }
        let sup_vals: Vec<f64> = sup.iter().map(|n| n.evaluate(bank, &m)).collect();
        let int_vals: Vec<f64> = int.iter().map(|n| n.evaluate(bank, &m)).collect();
        let sup_total: f64 = sup_vals.iter().sum();
        let int_total: f64 = int_vals.iter().sum();
        acc.sup = acc.sup.max(sup_total);
        if let Some((t_prev, v_prev)) = acc.last {
            acc.integral += 0.5 * (s.t - t_prev) * (v_prev + int_total);
        }
        acc.last = Some((s.t, int_total));
        row.extend(sup_vals);
        row.extend(int_vals);
        row.push(acc.sup);
        row.push(acc.integral);
        for (_, u, t) in &decays {
            let (a, b) = (u.evaluate(bank, &m), t.evaluate(bank, &m));
            row.extend([a + b, a, b]);
        }
        row.extend(config.norms.iter().map(|n| n.evaluate(bank, &m)));
        series.push(s.t, &row)
    };

    let dt = config.time.dt;
    let steps = (config.time.t_final / dt).round() as usize;
    let snap_steps: Vec<usize> = config.output.snapshot_times.iter().map(|&t| (t / dt).round() as usize).collect();
    let mut snapshots = Vec::new();
    let mut state = initial.clone();
    state.t = 0.0;
    for k in 0..=steps {
        if k > 0 {
            stepper.step_in_place(&mut state)?;
            state.t = k as f64 * dt;
        }
        if k % config.time.sample_every == 0 || k == steps {
            sample(&state, &mut series)?;
        }
        if snap_steps.contains(&k) {
            snapshots.push(Snapshot { t: state.t, u: state.u.clone(), tau: state.tau.clone() });
        }
    }
    Ok(RunOutput { series, snapshots, plan, e0, initial })
}
