//! Canonical norm sets of each case: initial-data, sup-in-time and
//! integrated-in-time norms, and the decay norms for a given `s₀`.

use serde::{Deserialize, Serialize};

use super::energy::BlockMoments;
use crate::lp::{hybrid_from_energies, BesovSpec, FilterBank};
use crate::solver::{Case, Target};

/// A labelled hybrid norm of one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormDecl {
    pub label: String,
    pub s: f64,
    pub t: f64,
    pub j0: i32,
    pub target: Target,
}

impl NormDecl {
    pub fn new(label: impl Into<String>, target: Target, s: f64, t: f64, j0: i32) -> Self {
        Self { label: label.into(), s, t, j0, target }
    }

    pub fn spec(&self) -> BesovSpec {
        BesovSpec::new(self.s, self.t, self.j0)
    }

    /// Value from precomputed block moments.
    pub fn evaluate(&self, bank: &FilterBank, m: &BlockMoments) -> f64 {
        let e = match self.target {
            Target::U => m.u_energies(),
            Target::Tau => m.tau_energies(),
            Target::Pdiv => m.pdiv_energies(),
        };
        hybrid_from_energies(bank, &e, &self.spec())
    }
}

fn pair(prefix: &str, second: Target, u: (f64, f64), s: (f64, f64), j0: i32) -> Vec<NormDecl> {
    vec![
        NormDecl::new(format!("{prefix}_u"), Target::U, u.0, u.1, j0),
        NormDecl::new(format!("{prefix}_{}", second.as_str()), second, s.0, s.1, j0),
    ]
}

/// Norms whose supremum in time enters the solution space.
pub fn sup_norms(case: Case, d: usize, j0: i32) -> Vec<NormDecl> {
    let h = d as f64 / 2.0;
    let u = (h - 1.0, h + 1.0);
    let tau = match case {
        Case::I | Case::V | Case::Custom => (h, h + 1.0),
        Case::II => (h - 1.0, h + 1.0),
        Case::III => (h, h),
        Case::IV => (h - 1.0, h),
    };
    pair("sup", Target::Tau, u, tau, j0)
}

/// Norms whose time integral enters the solution space.
pub fn integral_norms(case: Case, d: usize, j0: i32) -> Vec<NormDecl> {
    let h = d as f64 / 2.0;
    let (u, second, s) = match case {
        Case::I | Case::Custom => ((h + 1.0, h + 2.0), Target::Tau, (h, h + 1.0)),
        Case::II => ((h + 1.0, h + 2.0), Target::Pdiv, (h + 1.0, h + 1.0)),
        Case::III => ((h + 1.0, h + 1.0), Target::Tau, (h, h + 2.0)),
        Case::IV => ((h + 1.0, h + 1.0), Target::Tau, (h + 1.0, h + 2.0)),
        Case::V => ((h + 1.0, h + 1.0), Target::Tau, (h, h + 1.0)),
    };
    pair("int", second, u, s, j0)
}

/// Norms of the initial data whose sum is the smallness quantity.
pub fn initial_norms(case: Case, d: usize) -> Vec<NormDecl> {
    let mut v = sup_norms(case, d, 0);
    for n in v.iter_mut() {
        n.label = n.label.replacen("sup", "e0", 1);
    }
    v
}

/// `(u-part, τ-part)` of the norm predicted to decay like `(1+t)^{-s₀/2}`; none for Case II.
pub fn decay_norms(case: Case, d: usize, s0: f64) -> Option<(NormDecl, NormDecl)> {
    let h = d as f64 / 2.0;
    let tag = format!("{s0}");
    let u = NormDecl::new(format!("decay_u_s{tag}"), Target::U, h - 1.0 + s0, h + 1.0, 0);
    let tau = match case {
        Case::I | Case::V => (h + s0, h + 1.0),
        Case::III => (h + s0, h),
        Case::IV => (h - 1.0 + s0, h),
        Case::II | Case::Custom => return None,
    };
    Some((u, NormDecl::new(format!("decay_tau_s{tag}"), Target::Tau, tau.0, tau.1, 0)))
}

/// Label of the combined decay norm column.
pub fn decay_label(s0: f64) -> String {
    format!("decay_s{s0}")
}

/// Predicted exponent `−s₀/2`.
pub fn theory_exponent(s0: f64) -> f64 {
    -0.5 * s0
}
