//! Exact per-mode propagator of the linear coupled system.
//!
//! With `w = ℙ div τ`, `γ = α + ν₂|ξ|²` and the auxiliary `z' = −γz + u`,
//! the triple `(û, ŵ, ẑ)` obeys
//!
//! ```text
//! [ −ν₁|ξ|²    1    0 ]
//! [ −μ|ξ|²/2  −γ    0 ]
//! [    1       0   −γ ]
//! ```
//!
//! and the stress follows as `τ̂(t) = e^{−γt}τ̂₀ + μ·(i/2)(ξẑᵀ + ẑξᵀ)` with `ẑ(0) = 0`.

use num_complex::Complex64;

use super::ModelParams;
use crate::field::sym_index;
use crate::grid::GridContext;

pub type Mat3 = [[f64; 3]; 3];

fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Matrix exponential by scaling and squaring with a degree-20 Taylor core.
pub fn expm3(a: &Mat3) -> Mat3 {
    let norm = a.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = a[i][j] * scale;
        }
    }
    let mut result = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for k in (1..=20).rev() {
        let mut next = mul3(&s, &result);
        for (i, row) in next.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
            row[i] += 1.0;
        }
        result = next;
    }
    for _ in 0..squarings {
        result = mul3(&result, &result);
    }
    result
}

/// Propagator entries for one value of `|k|²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Entry {
    uu: f64,
    uw: f64,
    zu: f64,
    zw: f64,
    decay: f64,
}

/// Exact linear flow over a fixed step `dt`, tabulated by integer `|k|²`.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    pub params: ModelParams,
    pub dt: f64,
    table: Vec<Entry>,
}

impl LinearPropagator {
    pub fn new(ctx: &GridContext, params: ModelParams, dt: f64) -> Self {
        let max_k2 = ctx.k2.iter().copied().max().unwrap_or(0) as usize;
        let mut present = vec![false; max_k2 + 1];
        for &k2 in &ctx.k2 {
            present[k2 as usize] = true;
        }
        let dk2 = ctx.grid.dk() * ctx.grid.dk();
        let table = present
            .iter()
            .enumerate()
            .map(|(k2, &p)| if p { Self::entry(&params, k2 as f64 * dk2, dt) } else { Entry::default() })
            .collect();
        Self { params, dt, table }
    }

    fn entry(p: &ModelParams, xi2: f64, dt: f64) -> Entry {
        let gamma = p.alpha + p.nu2 * xi2;
        let m = [
            [-p.nu1 * xi2 * dt, dt, 0.0],
            [-0.5 * p.mu * xi2 * dt, -gamma * dt, 0.0],
            [dt, 0.0, -gamma * dt],
        ];
        let e = expm3(&m);
        Entry { uu: e[0][0], uw: e[0][1], zu: e[2][0], zw: e[2][1], decay: (-gamma * dt).exp() }
    }

    /// Advances `(u, τ)` in place by one exact linear step.
    pub fn apply(&self, ctx: &GridContext, u: &mut [Vec<Complex64>], tau: &mut [Vec<Complex64>]) {
        let d = ctx.grid.d;
        let mu = self.params.mu;
        let half_i = Complex64::new(0.0, 0.5 * mu);
        let mut w = [Complex64::default(); 3];
        let mut z = [Complex64::default(); 3];
        for idx in 0..ctx.grid.len() {
            let e = self.table[ctx.k2[idx] as usize];
            let xi = &ctx.xi[idx];
            let xi2 = ctx.xi2[idx];
            // w = ℙ(i τ ξ)
            for i in 0..d {
                let mut s = Complex64::default();
                for j in 0..d {
                    s += tau[sym_index(d, i, j)][idx] * xi[j];
                }
                w[i] = Complex64::new(0.0, 1.0) * s;
            }
            if xi2 > 0.0 {
                let dot: Complex64 = (0..d).map(|i| xi[i] * w[i]).sum::<Complex64>() / xi2;
                for i in 0..d {
                    w[i] -= dot * xi[i];
                }
            }
            for i in 0..d {
                let u0 = u[i][idx];
                z[i] = e.zu * u0 + e.zw * w[i];
                u[i][idx] = e.uu * u0 + e.uw * w[i];
            }
            for i in 0..d {
                for j in i..d {
                    let c = sym_index(d, i, j);
                    tau[c][idx] = e.decay * tau[c][idx] + half_i * (xi[i] * z[j] + z[i] * xi[j]);
                }
            }
        }
    }
}
