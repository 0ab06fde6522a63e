//! Fourier-multiplier operators, Leray projection, the L² pairing and the
//! commutator operator `𝔹(∇u, ∇τ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{sym_index, sym_weight, Rank, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Differential operator applied as an exact Fourier multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffOp {
    Grad,
    Div,
    Laplacian,
    /// `Λ^σ = |ξ|^σ`; negative powers need `exclude_zero_mode`.
    LambdaPower { sigma: f64, exclude_zero_mode: bool },
}

pub fn spectral_diff(f: &SpectralField, op: DiffOp) -> Result<SpectralField> {
    let grid = f.grid;
    let d = grid.d;
    let ctx = grid.context();
    match op {
        DiffOp::Grad => {
            if f.rank != Rank::Scalar {
                return Err(Error::RankMismatch("grad expects a scalar field".into()));
            }
            let mut out = SpectralField::zeros(grid, Rank::Vector);
            for (i, comp) in out.comps.iter_mut().enumerate() {
                for (idx, z) in comp.iter_mut().enumerate() {
                    *z = I * ctx.xi[idx][i] * f.comps[0][idx];
                }
            }
            Ok(out)
        }
        DiffOp::Div => match f.rank {
            Rank::Vector => {
                let mut out = SpectralField::zeros(grid, Rank::Scalar);
                for idx in 0..grid.len() {
                    let s: Complex64 = (0..d).map(|i| ctx.xi[idx][i] * f.comps[i][idx]).sum();
                    out.comps[0][idx] = I * s;
                }
                Ok(out)
            }
            Rank::SymTensor => Ok(div_tensor(f)),
            Rank::Scalar => Err(Error::RankMismatch("div needs a vector or tensor field".into())),
        },
        DiffOp::Laplacian => Ok(multiplier(f, |_, x2| -x2)),
        DiffOp::LambdaPower { sigma, exclude_zero_mode } => {
            if sigma < 0.0 && !exclude_zero_mode {
                return Err(Error::ZeroModeExclusion { sigma });
            }
            Ok(multiplier(f, |_, x2| {
                if x2 == 0.0 {
                    if sigma == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    x2.powf(0.5 * sigma)
                }
            }))
        }
    }
}

/// Applies a radial real multiplier `m(idx, |ξ|²)` to every component.
pub fn multiplier(f: &SpectralField, m: impl Fn(usize, f64) -> f64) -> SpectralField {
    let ctx = f.grid.context();
    let mut out = f.clone();
    for comp in out.comps.iter_mut() {
        for (idx, z) in comp.iter_mut().enumerate() {
            *z *= m(idx, ctx.xi2[idx]);
        }
    }
    out
}

/// `(div τ)_i = Σ_j ∂_j τ_ij`.
fn div_tensor(tau: &SpectralField) -> SpectralField {
    let grid = tau.grid;
    let d = grid.d;
    let ctx = grid.context();
    let mut out = SpectralField::zeros(grid, Rank::Vector);
    for i in 0..d {
        for idx in 0..grid.len() {
            let s: Complex64 = (0..d)
                .map(|j| ctx.xi[idx][j] * tau.comps[sym_index(d, i, j)][idx])
                .sum();
            out.comps[i][idx] = I * s;
        }
    }
    out
}

/// Applies `I − ξξᵀ/|ξ|²` mode by mode; the zero mode passes unchanged.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    if v.rank != Rank::Vector {
        return Err(Error::RankMismatch("Leray projection expects a vector field".into()));
    }
    let mut out = v.clone();
    leray_in_place(&mut out.comps, v.grid.d, &v.grid.context().xi, &v.grid.context().xi2);
    Ok(out)
}

pub(crate) fn leray_in_place(comps: &mut [Vec<Complex64>], d: usize, xi: &[[f64; 3]], xi2: &[f64]) {
    for idx in 0..xi.len() {
        if xi2[idx] == 0.0 {
            continue;
        }
        let dot: Complex64 = (0..d).map(|i| xi[idx][i] * comps[i][idx]).sum();
        let s = dot / xi2[idx];
        for i in 0..d {
            comps[i][idx] -= s * xi[idx][i];
        }
    }
}

/// L² inner product over the box via Parseval (Frobenius pairing for tensors).
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    f.check_same(g)?;
    let d = f.grid.d;
    let mut total = 0.0;
    for (ci, (a, b)) in f.comps.iter().zip(g.comps.iter()).enumerate() {
        let w = if f.rank == Rank::SymTensor { sym_weight(d, ci) } else { 1.0 };
        let s: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum();
        total += w * s;
    }
    Ok(total * f.grid.volume())
}

/// `ℙ div τ`.
pub fn projected_div(tau: &SpectralField) -> Result<SpectralField> {
    if tau.rank != Rank::SymTensor {
        return Err(Error::RankMismatch("projected divergence expects a tensor".into()));
    }
    leray_project(&div_tensor(tau))
}

/// Relative size of the divergence, `‖div u‖ / ‖Λu‖`.
pub fn relative_divergence(u: &SpectralField) -> Result<f64> {
    let div = spectral_diff(u, DiffOp::Div)?;
    let lam = spectral_diff(u, DiffOp::LambdaPower { sigma: 1.0, exclude_zero_mode: true })?;
    let scale = lam.norm();
    Ok(if scale == 0.0 { 0.0 } else { div.norm() / scale })
}

/// Physical values of `∂_j u_i`, indexed `[i * d + j]`.
pub(crate) fn velocity_gradient_physical(u: &SpectralField) -> Vec<Vec<f64>> {
    let d = u.grid.d;
    let ctx = u.grid.context();
    let mut spec = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            spec.push(
                (0..u.grid.len())
                    .map(|idx| I * ctx.xi[idx][j] * u.comps[i][idx])
                    .collect::<Vec<_>>(),
            );
        }
    }
    let refs: Vec<&[Complex64]> = spec.iter().map(|c| c.as_slice()).collect();
    ctx.to_physical(&refs)
}

/// Transforms rows `[i * d + k]` of physical values, truncates and returns `Σ_k ∂_k row_{ik}`.
fn div_of_physical_rows(grid: crate::grid::Grid, rows: &[Vec<f64>]) -> SpectralField {
    let d = grid.d;
    let ctx = grid.context();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    let mut spec = ctx.to_spectral(&refs);
    for s in spec.iter_mut() {
        ctx.truncate(s);
    }
    let mut out = SpectralField::zeros(grid, Rank::Vector);
    for i in 0..d {
        for idx in 0..grid.len() {
            let s: Complex64 = (0..d).map(|k| ctx.xi[idx][k] * spec[i * d + k][idx]).sum();
            out.comps[i][idx] = I * s;
        }
    }
    out
}

/// `𝔹(∇u,∇τ) = ℙ(∇u·∇τ) − ℙ(∇u·∇Δ⁻¹∇·div τ)` through the divergence forms
/// `(∇u·∇τ)^i = ∂_k(∂_j u^k τ^{ij})` and `(∇u·∇φ)^i = ∂_k(∂_i u^k φ)`.
pub fn b_operator(u: &SpectralField, tau: &SpectralField) -> Result<SpectralField> {
    check_pair(u, tau)?;
    let grid = u.grid;
    let d = grid.d;
    let ctx = grid.context();
    let n_pts = grid.len();

    let mut phi_hat = vec![Complex64::default(); n_pts];
    for (idx, p) in phi_hat.iter_mut().enumerate() {
        if ctx.xi2[idx] == 0.0 {
            continue;
        }
        let mut s = Complex64::default();
        for i in 0..d {
            for j in 0..d {
                s += ctx.xi[idx][i] * ctx.xi[idx][j] * tau.comps[sym_index(d, i, j)][idx];
            }
        }
        *p = s / ctx.xi2[idx];
    }
    let grad_u = velocity_gradient_physical(u);
    let mut tau_refs: Vec<&[Complex64]> = tau.comps.iter().map(|c| c.as_slice()).collect();
    tau_refs.push(&phi_hat);
    let mut tau_phys = ctx.to_physical(&tau_refs);
    let phi = tau_phys.pop().expect("phi component");

    let mut rows = vec![vec![0.0; n_pts]; d * d];
    for p in 0..n_pts {
        for i in 0..d {
            for k in 0..d {
                let mut s = -grad_u[k * d + i][p] * phi[p];
                for j in 0..d {
                    s += grad_u[k * d + j][p] * tau_phys[sym_index(d, i, j)][p];
                }
                rows[i * d + k][p] = s;
            }
        }
    }
    let mut out = div_of_physical_rows(grid, &rows);
    leray_in_place(&mut out.comps, d, &ctx.xi, &ctx.xi2);
    Ok(out)
}

/// Residual `‖ℙdiv(u·∇τ) − ℙ(u·∇ℙdiv τ) − 𝔹‖` relative to the largest term.
pub fn b_identity_residual(u: &SpectralField, tau: &SpectralField) -> Result<f64> {
    let b = b_operator(u, tau)?;
    let grid = u.grid;
    let d = grid.d;
    let ctx = grid.context();
    let n_pts = grid.len();
    let m = tau.comps.len();

    let u_phys = u.to_physical();
    // u·∇τ, component-wise, then ℙ div.
    let mut grad_tau_spec = Vec::with_capacity(m * d);
    for c in 0..m {
        for k in 0..d {
            grad_tau_spec.push(
                (0..n_pts)
                    .map(|idx| I * ctx.xi[idx][k] * tau.comps[c][idx])
                    .collect::<Vec<_>>(),
            );
        }
    }
    let refs: Vec<&[Complex64]> = grad_tau_spec.iter().map(|c| c.as_slice()).collect();
    let grad_tau = ctx.to_physical(&refs);
    let adv: Vec<Vec<f64>> = (0..m)
        .map(|c| {
            (0..n_pts)
                .map(|p| (0..d).map(|k| u_phys[k][p] * grad_tau[c * d + k][p]).sum())
                .collect()
        })
        .collect();
    let mut adv_tau = SpectralField::from_physical(grid, Rank::SymTensor, &adv)?;
    adv_tau.truncate();
    let lhs = projected_div(&adv_tau)?;

    // ℙ(u·∇w) with w = ℙ div τ.
    let w = projected_div(tau)?;
    let mut grad_w_spec = Vec::with_capacity(d * d);
    for i in 0..d {
        for k in 0..d {
            grad_w_spec.push(
                (0..n_pts)
                    .map(|idx| I * ctx.xi[idx][k] * w.comps[i][idx])
                    .collect::<Vec<_>>(),
            );
        }
    }
    let refs: Vec<&[Complex64]> = grad_w_spec.iter().map(|c| c.as_slice()).collect();
    let grad_w = ctx.to_physical(&refs);
    let adv_w: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..n_pts)
                .map(|p| (0..d).map(|k| u_phys[k][p] * grad_w[i * d + k][p]).sum())
                .collect()
        })
        .collect();
    let mut rhs = SpectralField::from_physical(grid, Rank::Vector, &adv_w)?;
    rhs.truncate();
    let rhs = leray_project(&rhs)?;

    let mut resid = lhs.sub(&rhs)?;
    resid.axpy(-1.0, &b)?;
    let scale = lhs.norm().max(rhs.norm()).max(b.norm());
    Ok(if scale == 0.0 { 0.0 } else { resid.norm() / scale })
}

fn check_pair(u: &SpectralField, tau: &SpectralField) -> Result<()> {
    if u.grid != tau.grid {
        return Err(Error::GridMismatch);
    }
    if u.rank != Rank::Vector || tau.rank != Rank::SymTensor {
        return Err(Error::RankMismatch("expected (vector, symtensor) pair".into()));
    }
    let tolerance = 1e-10;
    let relative = relative_divergence(u)?;
    if relative > tolerance {
        return Err(Error::NotDivergenceFree { relative, tolerance });
    }
    Ok(())
}
