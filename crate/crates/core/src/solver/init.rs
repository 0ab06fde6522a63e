//! Random initial data with a prescribed broken-power-law spectral envelope.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sym_weight, Rank, SpectralField};
use crate::grid::Grid;
use crate::lp::{build_filter_bank, hybrid_besov_norm, BesovSpec};

/// Field a norm declaration refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    U,
    Tau,
    /// `Λ⁻¹ℙ div τ`, the stress combination that couples to the velocity.
    Pdiv,
}

impl Target {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "u" => Some(Target::U),
            "tau" => Some(Target::Tau),
            "pdiv" => Some(Target::Pdiv),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Target::U => "u",
            Target::Tau => "tau",
            Target::Pdiv => "pdiv",
        }
    }
}

/// Requested hybrid norm of one initial field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTarget {
    pub spec: BesovSpec,
    pub target: Target,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub amplitude: f64,
    pub low_slope: f64,
    pub high_slope: f64,
    pub seed: u64,
    /// Multiplier applied to the stress after generation.
    pub tau_factor: f64,
    pub target_norms: Vec<NormTarget>,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            low_slope: -1.0,
            high_slope: -4.0,
            seed: 1,
            tau_factor: 1.0,
            target_norms: Vec::new(),
        }
    }
}

impl InitialDataSpec {
    /// Envelope `A|ξ|^{low}` below 1 and `A|ξ|^{high}` above.
    pub fn envelope(&self, xi: f64) -> f64 {
        let e = if xi < 1.0 { self.low_slope } else { self.high_slope };
        self.amplitude * xi.powf(e)
    }
}

fn unit_random(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Generates divergence-free `u₀` and symmetric `τ₀`; every retained mode has
/// modulus exactly equal to the envelope and a random direction.
pub fn make_initial_data(grid: Grid, spec: &InitialDataSpec) -> Result<(SpectralField, SpectralField)> {
    let ctx = grid.context();
    let d = grid.d;
    let mut u = SpectralField::zeros(grid, Rank::Vector);
    let mut tau = SpectralField::zeros(grid, Rank::SymTensor);
    let m = tau.comps.len();
    let mut rng_u = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_t = ChaCha8Rng::seed_from_u64(spec.seed);
    rng_t.set_stream(1);
    for idx in 0..grid.len() {
        let neg = ctx.neg[idx];
        if neg <= idx || ctx.xi2[idx] == 0.0 || !ctx.keep[idx] {
            continue;
        }
        let xi = ctx.xi[idx];
        let env = spec.envelope(ctx.xi2[idx].sqrt());

        let mut v = unit_random(&mut rng_u, d);
        let dot: Complex64 = (0..d).map(|i| xi[i] * v[i]).sum::<Complex64>() / ctx.xi2[idx];
        for i in 0..d {
            v[i] -= dot * xi[i];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            let z = if norm > 0.0 { v[i] * (env / norm) } else { Complex64::default() };
            u.comps[i][idx] = z;
            u.comps[i][neg] = z.conj();
        }

        let s = unit_random(&mut rng_t, m);
        let norm = (0..m).map(|c| sym_weight(d, c) * s[c].norm_sqr()).sum::<f64>().sqrt();
        for c in 0..m {
            let z = s[c] * (spec.tau_factor * env / norm);
            tau.comps[c][idx] = z;
            tau.comps[c][neg] = z.conj();
        }
    }

    if !spec.target_norms.is_empty() {
        let bank = build_filter_bank(grid, 1.0)?;
        for nt in &spec.target_norms {
            let field = match nt.target {
                Target::U => &mut u,
                Target::Tau => &mut tau,
                Target::Pdiv => {
                    return Err(Error::UnreachableTarget("pdiv cannot be rescaled directly".into()))
                }
            };
            let current = hybrid_besov_norm(&bank, field, &nt.spec)?;
            if current == 0.0 {
                return Err(Error::UnreachableTarget(format!(
                    "{} has zero norm for (s={}, t={}, j0={})",
                    nt.target.as_str(),
                    nt.spec.s,
                    nt.spec.t,
                    nt.spec.j0
                )));
            }
            field.scale(nt.value / current);
        }
    }
    Ok((u, tau))
}
