//! Integrating-factor Heun scheme: the stiff linear block is propagated
//! exactly, advection and `𝒬` are explicit.
//!
//! With `E = exp(dt·L)` and nonlinear operator `N`:
//!
//! ```text
//! U*      = E(Uₙ + dt·N(Uₙ))
//! Uₙ₊₁    = E(Uₙ + dt/2·N(Uₙ)) + dt/2·N(U*)
//! ```

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;

use super::{LinearPropagator, ModelParams, State};
use crate::constitutive::{gradient_at, q_pointwise, tensor_at, QSpec};
use crate::error::{Error, Result};
use crate::field::{sym_index, Rank};
use crate::grid::GridContext;
use crate::ops::leray_in_place;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fixed-step integrator for one `(params, q, dt)` triple.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub params: ModelParams,
    pub q: QSpec,
    pub dt: f64,
    pub cfl: f64,
    /// When false only the exact linear flow is applied.
    pub nonlinear: bool,
    ctx: Arc<GridContext>,
    propagator: LinearPropagator,
    work: RefCell<Workspace>,
}

/// Reused spectral and physical arrays; first `d` entries of `k1`, `k2`,
/// `star` are velocity components, the rest stress components.
#[derive(Clone, Default)]
struct Workspace {
    spec: Vec<Vec<Complex64>>,
    phys: Vec<Vec<f64>>,
    rhs: Vec<Vec<f64>>,
    k1: Vec<Vec<Complex64>>,
    k2: Vec<Vec<Complex64>>,
    star: Vec<Vec<Complex64>>,
}

impl std::fmt::Debug for Workspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Workspace")
    }
}

impl Workspace {
    fn new(d: usize, len: usize) -> Self {
        let m = d * (d + 1) / 2;
        let zc = |k: usize| vec![vec![Complex64::default(); len]; k];
        let zr = |k: usize| vec![vec![0.0; len]; k];
        let inputs = d + d * d + m + m * d;
        Self {
            spec: zc(inputs),
            phys: zr(inputs),
            rhs: zr(d + m),
            k1: zc(d + m),
            k2: zc(d + m),
            star: zc(d + m),
        }
    }
}

impl Stepper {
    pub fn new(ctx: Arc<GridContext>, params: ModelParams, q: QSpec, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        if params.d != ctx.grid.d {
            return Err(Error::InvalidParameter(format!(
                "model dimension {} differs from grid dimension {}",
                params.d, ctx.grid.d
            )));
        }
        q.validate()?;
        let propagator = LinearPropagator::new(&ctx, params, dt);
        let work = RefCell::new(Workspace::default());
        Ok(Self { params, q, dt, cfl: 0.4, nonlinear: true, ctx, propagator, work })
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn context(&self) -> &Arc<GridContext> {
        &self.ctx
    }

    /// Advances the state by one step.
    pub fn step(&self, state: &State) -> Result<State> {
        let mut next = state.clone();
        self.step_in_place(&mut next)?;
        Ok(next)
    }

    /// Advances `steps` times, returning the final state.
    pub fn advance(&self, state: &State, steps: usize) -> Result<State> {
        let mut s = state.clone();
        for _ in 0..steps {
            self.step_in_place(&mut s)?;
        }
        Ok(s)
    }

    /// Advances the state by one step, reusing its storage.
    pub fn step_in_place(&self, state: &mut State) -> Result<()> {
        if state.u.grid != self.ctx.grid || state.tau.grid != self.ctx.grid {
            return Err(Error::GridMismatch);
        }
        if state.u.rank != Rank::Vector || state.tau.rank != Rank::SymTensor {
            return Err(Error::RankMismatch("state expects (vector, symtensor)".into()));
        }
        let h = self.dt;
        let t_next = state.t + h;
        if !self.nonlinear {
            self.propagator.apply(&self.ctx, &mut state.u.comps, &mut state.tau.comps);
            return self.finish(state, t_next);
        }
        let d = self.ctx.grid.d;
        let mut guard = self.work.borrow_mut();
        if guard.k1.len() != d + state.tau.comps.len() || guard.k1[0].len() != self.ctx.grid.len() {
            *guard = Workspace::new(d, self.ctx.grid.len());
        }
        let ws = &mut *guard;

        let max_u = self.tendency(&state.u.comps, &state.tau.comps, &mut ws.spec, &mut ws.phys, &mut ws.rhs, &mut ws.k1);
        self.check_cfl(state.t, max_u)?;

        for (dst, src) in ws.star.iter_mut().zip(state.u.comps.iter().chain(state.tau.comps.iter())) {
            dst.copy_from_slice(src);
        }
        axpy(&mut ws.star, h, &ws.k1);
        {
            let (su, st) = ws.star.split_at_mut(d);
            self.propagator.apply(&self.ctx, su, st);
            self.project(su, st);
        }
        let (su, st) = ws.star.split_at(d);
        self.tendency(su, st, &mut ws.spec, &mut ws.phys, &mut ws.rhs, &mut ws.k2);

        let (k1u, k1t) = ws.k1.split_at(d);
        let (k2u, k2t) = ws.k2.split_at(d);
        axpy(&mut state.u.comps, 0.5 * h, k1u);
        axpy(&mut state.tau.comps, 0.5 * h, k1t);
        self.propagator.apply(&self.ctx, &mut state.u.comps, &mut state.tau.comps);
        axpy(&mut state.u.comps, 0.5 * h, k2u);
        axpy(&mut state.tau.comps, 0.5 * h, k2t);
        drop(guard);
        self.finish(state, t_next)
    }

    fn check_cfl(&self, t: f64, max_u: f64) -> Result<()> {
        if max_u > 0.0 {
            let limit = self.cfl * self.ctx.grid.dx() / max_u;
            if self.dt > limit {
                return Err(Error::Cfl { t, dt: self.dt, limit });
            }
        }
        Ok(())
    }

    fn project(&self, u: &mut [Vec<Complex64>], tau: &mut [Vec<Complex64>]) {
        for c in u.iter_mut().chain(tau.iter_mut()) {
            self.ctx.truncate(c);
        }
        leray_in_place(u, self.ctx.grid.d, &self.ctx.xi, &self.ctx.xi2);
    }

    fn finish(&self, state: &mut State, t: f64) -> Result<()> {
        self.project(&mut state.u.comps, &mut state.tau.comps);
        for (name, comps) in [("u", &state.u.comps), ("tau", &state.tau.comps)] {
            if comps.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite { t, field: name.into() });
            }
        }
        state.t = t;
        Ok(())
    }

    /// Writes `N_u = −ℙ(u·∇u)` and `N_τ = −(u·∇τ + 𝒬(τ, ∇u))`, dealiased, into
    /// `out`; returns `max|u|`.
    fn tendency(
        &self,
        u: &[Vec<Complex64>],
        tau: &[Vec<Complex64>],
        spec: &mut [Vec<Complex64>],
        phys: &mut [Vec<f64>],
        rhs: &mut [Vec<f64>],
        out: &mut [Vec<Complex64>],
    ) -> f64 {
        let ctx = &self.ctx;
        let d = ctx.grid.d;
        let len = ctx.grid.len();
        let m = tau.len();
        let deriv = |dst: &mut Vec<Complex64>, c: &[Complex64], j: usize| {
            for ((o, z), x) in dst.iter_mut().zip(c.iter()).zip(ctx.xi.iter()) {
                *o = I * x[j] * *z;
            }
        };
        let mut slot = 0;
        for ui in u {
            spec[slot].copy_from_slice(ui);
            slot += 1;
        }
        for ui in u {
            for j in 0..d {
                deriv(&mut spec[slot], ui, j);
                slot += 1;
            }
        }
        for tc in tau {
            spec[slot].copy_from_slice(tc);
            slot += 1;
        }
        for tc in tau {
            for j in 0..d {
                deriv(&mut spec[slot], tc, j);
                slot += 1;
            }
        }
        let refs: Vec<&[Complex64]> = spec.iter().map(|c| c.as_slice()).collect();
        ctx.to_physical_into(&refs, phys);
        let (vel, rest) = phys.split_at(d);
        let (grad, rest) = rest.split_at(d * d);
        let (tau_p, grad_tau) = rest.split_at(m);

        let mut max_u: f64 = 0.0;
        let q_active = !matches!(self.q, QSpec::None);
        for p in 0..len {
            let mut speed = 0.0;
            for i in 0..d {
                speed += vel[i][p] * vel[i][p];
                rhs[i][p] = (0..d).map(|j| vel[j][p] * grad[i * d + j][p]).sum();
            }
            max_u = max_u.max(speed.sqrt());
            for c in 0..m {
                rhs[d + c][p] = (0..d).map(|j| vel[j][p] * grad_tau[c * d + j][p]).sum();
            }
            if q_active {
                let qv = q_pointwise(&self.q, &tensor_at(tau_p, d, p), &gradient_at(grad, d, p), d);
                for a in 0..d {
                    for b in a..d {
                        rhs[d + sym_index(d, a, b)][p] += qv[a][b];
                    }
                }
            }
        }

        let refs: Vec<&[f64]> = rhs.iter().map(|c| c.as_slice()).collect();
        ctx.to_spectral_into(&refs, out);
        for c in out.iter_mut() {
            ctx.truncate(c);
            c.iter_mut().for_each(|z| *z = -*z);
        }
        leray_in_place(&mut out[..d], d, &ctx.xi, &ctx.xi2);
        max_u
    }
}

fn axpy(y: &mut [Vec<Complex64>], a: f64, x: &[Vec<Complex64>]) {
    for (yc, xc) in y.iter_mut().zip(x.iter()) {
        for (yv, xv) in yc.iter_mut().zip(xc.iter()) {
            *yv += a * *xv;
        }
    }
}

/// One step of the coupled system with CFL number 0.4.
pub fn step(state: &State, params: &ModelParams, q: &QSpec, dt: f64) -> Result<State> {
    Stepper::new(state.u.grid.context(), *params, q.clone(), dt)?.step(state)
}
