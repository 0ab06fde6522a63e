//! Model parameters, case gating, initial data and IMEX time stepping.

mod init;
mod linear;
mod run;
mod stepper;

use serde::{Deserialize, Serialize};

use crate::constitutive::{Monomial, QSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;

pub use init::{make_initial_data, InitialDataSpec, NormTarget, Target};
pub use linear::{expm3, LinearPropagator};
pub use run::{initial_state, run, run_from, RunOutput, Snapshot, BANK_SHARPNESS};
pub use stepper::{step, Stepper};

/// Parameter regime of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
    Custom,
}

impl Case {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "I" => Some(Case::I),
            "II" => Some(Case::II),
            "III" => Some(Case::III),
            "IV" => Some(Case::IV),
            "V" => Some(Case::V),
            "custom" => Some(Case::Custom),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::V => "V",
            Case::Custom => "custom",
        }
    }

    pub const ALL: [Case; 5] = [Case::I, Case::II, Case::III, Case::IV, Case::V];

    /// Sign pattern `(ν₁ > 0, ν₂ > 0, α > 0)` of the case.
    pub fn pattern(self) -> Option<(bool, bool, bool)> {
        match self {
            Case::I => Some((true, false, true)),
            Case::II => Some((true, false, false)),
            Case::III => Some((false, true, true)),
            Case::IV => Some((false, true, false)),
            Case::V => Some((false, false, true)),
            Case::Custom => None,
        }
    }

    /// Case whose sign pattern matches the coefficients.
    pub fn classify(nu1: f64, nu2: f64, alpha: f64) -> Option<Self> {
        let p = (nu1 > 0.0, nu2 > 0.0, alpha > 0.0);
        Case::ALL.into_iter().find(|c| c.pattern() == Some(p))
    }

    /// Quadratic monomials admitted by the case.
    pub fn admissible(self) -> &'static [Monomial] {
        use Monomial::*;
        match self {
            Case::I | Case::III | Case::Custom => &[TauTau, TauGrad, GradGrad],
            Case::II | Case::IV => &[TauGrad, GradGrad],
            Case::V => &[TauTau],
        }
    }

    /// Largest admissible representative nonlinearity.
    pub fn maximal_q(self) -> QSpec {
        let has = |m| self.admissible().contains(&m);
        let coef = |m| if has(m) { 1.0 } else { 0.0 };
        QSpec::GenericQuadratic {
            qa: coef(Monomial::TauTau),
            qb: coef(Monomial::TauGrad),
            qc: coef(Monomial::GradGrad),
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients `(ν₁, ν₂, α, μ)` of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub nu1: f64,
    pub nu2: f64,
    pub alpha: f64,
    pub mu: f64,
    pub d: usize,
    pub case: Case,
}

impl ModelParams {
    /// Unit coefficients in the positions the case requires, `μ = 1`.
    pub fn for_case(case: Case, d: usize) -> Self {
        let (a, b, c) = case.pattern().unwrap_or((true, false, true));
        let one = |x: bool| if x { 1.0 } else { 0.0 };
        Self { nu1: one(a), nu2: one(b), alpha: one(c), mu: 1.0, d, case }
    }
}

/// Outcome of case gating.
#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub case: Case,
    pub warning: Option<String>,
}

/// Accepts `(params, q)` when the coefficients match the case and every
/// monomial of `q` is admitted by it.
pub fn validate_case(params: &ModelParams, q: &QSpec) -> Result<Admissibility> {
    q.validate()?;
    for (name, v) in [("nu1", params.nu1), ("nu2", params.nu2), ("alpha", params.alpha)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Inadmissible(format!("{name} = {v} must be finite and non-negative")));
        }
    }
    if !params.mu.is_finite() {
        return Err(Error::Inadmissible("mu must be finite".into()));
    }
    if let Some(a) = q.linear_damping() {
        if a != params.alpha {
            return Err(Error::Inadmissible(format!(
                "PTT damping q.alpha = {a} must equal model.alpha = {}",
                params.alpha
            )));
        }
    }
    if params.case == Case::Custom {
        return Ok(Admissibility {
            case: Case::Custom,
            warning: Some("custom case bypasses the admissibility table".into()),
        });
    }
    let found = Case::classify(params.nu1, params.nu2, params.alpha).ok_or_else(|| {
        Error::Inadmissible(format!(
            "(nu1, nu2, alpha) = ({}, {}, {}) matches no case",
            params.nu1, params.nu2, params.alpha
        ))
    })?;
    if found != params.case {
        return Err(Error::Inadmissible(format!(
            "coefficients describe Case {found}, declared Case {}",
            params.case
        )));
    }
    for m in q.monomials() {
        if !found.admissible().contains(&m) {
            return Err(Error::Inadmissible(format!(
                "{} monomial not admissible in Case {found}",
                m.label()
            )));
        }
    }
    Ok(Admissibility { case: found, warning: None })
}

/// Velocity and stress at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: SpectralField,
    pub tau: SpectralField,
    pub t: f64,
}
