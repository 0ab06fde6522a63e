//! Strain/vorticity splitting, the constitutive nonlinearities `𝒬(τ, ∇u)` and
//! frame-indifference checks for tensor derivatives.
//!
//! Convention: `(∇u)_{ij} = ∂u_i/∂x_j`. Under it the upper-convected derivative
//! reads `τ_t + u·∇τ − (∇u)τ − τ(∇u)ᵀ` and equals `𝒟_1`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sym_index, Rank, SpectralField};
use crate::ops::velocity_gradient_physical;

/// Dense `3×3` matrix; for `d = 2` only the leading `2×2` block is used.
pub type Mat = [[f64; 3]; 3];

pub const ZERO: Mat = [[0.0; 3]; 3];

pub fn identity(d: usize) -> Mat {
    let mut m = ZERO;
    for (i, row) in m.iter_mut().enumerate().take(d) {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut c = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Mat) -> Mat {
    let mut t = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    lin(1.0, a, 1.0, b)
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    lin(1.0, a, -1.0, b)
}

/// `x·a + y·b`.
pub fn lin(x: f64, a: &Mat, y: f64, b: &Mat) -> Mat {
    let mut c = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = x * a[i][j] + y * b[i][j];
        }
    }
    c
}

pub fn scale(x: f64, a: &Mat) -> Mat {
    lin(x, a, 0.0, &ZERO)
}

pub fn trace(a: &Mat) -> f64 {
    a[0][0] + a[1][1] + a[2][2]
}

/// Frobenius contraction `a : b`.
pub fn contract(a: &Mat, b: &Mat) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| a[i][j] * b[i][j]).sum()
}

pub fn frobenius(a: &Mat) -> f64 {
    contract(a, a).sqrt()
}

/// Splits `∇u` into `D = (∇u + ∇uᵀ)/2` and `Ω = (∇u − ∇uᵀ)/2`.
pub fn strain_and_vorticity(grad_u: &Mat) -> (Mat, Mat) {
    let gt = transpose(grad_u);
    (lin(0.5, grad_u, 0.5, &gt), lin(0.5, grad_u, -0.5, &gt))
}

/// Quadratic monomial classes of the constitutive nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Monomial {
    TauTau,
    TauGrad,
    GradGrad,
}

impl Monomial {
    pub fn label(self) -> &'static str {
        match self {
            Monomial::TauTau => "τ²",
            Monomial::TauGrad => "τ∇u",
            Monomial::GradGrad => "(∇u)²",
        }
    }
}

/// Constitutive nonlinearity placed on the left of the stress equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum QSpec {
    None,
    OldroydB { b: f64 },
    JohnsonSegalman { a: f64 },
    PttLinear { alpha: f64, beta: f64 },
    Giesekus { beta: f64 },
    Generalized { b: f64, c1: f64, c2: f64, c3: f64, c4: f64 },
    GenericQuadratic { qa: f64, qb: f64, qc: f64 },
}

impl QSpec {
    pub fn name(&self) -> &'static str {
        match self {
            QSpec::None => "none",
            QSpec::OldroydB { .. } => "oldroyd_b",
            QSpec::JohnsonSegalman { .. } => "johnson_segalman",
            QSpec::PttLinear { .. } => "ptt_linear",
            QSpec::Giesekus { .. } => "giesekus",
            QSpec::Generalized { .. } => "generalized",
            QSpec::GenericQuadratic { .. } => "generic_quadratic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (-1.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} outside [-1, 1]")))
            }
        };
        match *self {
            QSpec::OldroydB { b } => unit("q.b", b),
            QSpec::JohnsonSegalman { a } => unit("q.a", a),
            QSpec::Generalized { b, .. } => unit("q.b", b),
            QSpec::PttLinear { alpha, .. } if alpha < 0.0 => {
                Err(Error::InvalidParameter(format!("q.alpha = {alpha} must be non-negative")))
            }
            _ => Ok(()),
        }
    }

    /// Monomial classes with nonzero coefficient.
    pub fn monomials(&self) -> BTreeSet<Monomial> {
        let mut set = BTreeSet::new();
        match *self {
            QSpec::None => {}
            QSpec::OldroydB { .. } | QSpec::JohnsonSegalman { .. } => {
                set.insert(Monomial::TauGrad);
            }
            QSpec::PttLinear { beta, .. } | QSpec::Giesekus { beta } => {
                set.insert(Monomial::TauGrad);
                if beta != 0.0 {
                    set.insert(Monomial::TauTau);
                }
            }
            QSpec::Generalized { c3, c4, .. } => {
                set.insert(Monomial::TauGrad);
                if c3 != 0.0 || c4 != 0.0 {
                    set.insert(Monomial::GradGrad);
                }
            }
            QSpec::GenericQuadratic { qa, qb, qc } => {
                if qa != 0.0 {
                    set.insert(Monomial::TauTau);
                }
                if qb != 0.0 {
                    set.insert(Monomial::TauGrad);
                }
                if qc != 0.0 {
                    set.insert(Monomial::GradGrad);
                }
            }
        }
        set
    }

    /// Linear damping carried by the law itself (the `ατ` part of linear PTT).
    pub fn linear_damping(&self) -> Option<f64> {
        match *self {
            QSpec::PttLinear { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// Whether `𝒬(τ, ∇u)` uses `∇u` at all.
    pub fn needs_gradient(&self) -> bool {
        !matches!(self, QSpec::None)
            && !matches!(self, QSpec::GenericQuadratic { qb, qc, .. } if *qb == 0.0 && *qc == 0.0)
    }
}

/// `𝒬_b(τ, ∇u) = τΩ − Ωτ − b(Dτ + τD)`.
pub fn q_b(b: f64, tau: &Mat, grad_u: &Mat) -> Mat {
    let (dm, om) = strain_and_vorticity(grad_u);
    let rot = sub(&matmul(tau, &om), &matmul(&om, tau));
    let stretch = add(&matmul(&dm, tau), &matmul(tau, &dm));
    lin(1.0, &rot, -b, &stretch)
}

/// Upper-convected terms `−(∇u)τ − τ(∇u)ᵀ`.
pub fn upper_convected_terms(tau: &Mat, grad_u: &Mat) -> Mat {
    let g = grad_u;
    let gt = transpose(g);
    scale(-1.0, &add(&matmul(g, tau), &matmul(tau, &gt)))
}

/// Lower-convected terms `(∇u)ᵀτ + τ(∇u)`.
pub fn lower_convected_terms(tau: &Mat, grad_u: &Mat) -> Mat {
    let g = grad_u;
    let gt = transpose(g);
    add(&matmul(&gt, tau), &matmul(tau, g))
}

/// Pointwise `𝒬(τ, ∇u)`.
pub fn q_pointwise(spec: &QSpec, tau: &Mat, grad_u: &Mat, d: usize) -> Mat {
    match *spec {
        QSpec::None => ZERO,
        QSpec::OldroydB { b } => q_b(b, tau, grad_u),
        QSpec::JohnsonSegalman { a } => lin(
            0.5 * (1.0 + a),
            &upper_convected_terms(tau, grad_u),
            0.5 * (1.0 - a),
            &lower_convected_terms(tau, grad_u),
        ),
        QSpec::PttLinear { beta, .. } => lin(1.0, &q_b(1.0, tau, grad_u), beta * trace(tau), tau),
        QSpec::Giesekus { beta } => {
            lin(1.0, &upper_convected_terms(tau, grad_u), beta, &matmul(tau, tau))
        }
        QSpec::Generalized { b, c1, c2, c3, c4 } => {
            let (dm, _) = strain_and_vorticity(grad_u);
            let id = identity(d);
            let mut out = q_b(b, tau, grad_u);
            out = lin(1.0, &out, c1 * trace(tau), &dm);
            out = lin(1.0, &out, c2 * contract(tau, &dm), &id);
            out = lin(1.0, &out, c3, &matmul(&dm, &dm));
            lin(1.0, &out, c4 * contract(&dm, &dm), &id)
        }
        QSpec::GenericQuadratic { qa, qb, qc } => {
            let (dm, _) = strain_and_vorticity(grad_u);
            let coupling = add(&matmul(&dm, tau), &matmul(tau, &dm));
            let mut out = scale(qa, &matmul(tau, tau));
            out = lin(1.0, &out, 0.5 * qb, &coupling);
            lin(1.0, &out, qc, &matmul(&dm, &dm))
        }
    }
}

/// Full linear PTT left-hand side `(α + β tr τ)τ + 𝒬_1(τ, ∇u)`.
pub fn ptt_full_law(alpha: f64, beta: f64, tau: &Mat, grad_u: &Mat) -> Mat {
    lin(alpha + beta * trace(tau), tau, 1.0, &q_b(1.0, tau, grad_u))
}

/// Largest asymmetry `max |a_ij − a_ji|`.
pub fn asymmetry(a: &Mat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - a[j][i]).abs());
        }
    }
    worst
}

/// Checked pointwise evaluation; rejects non-symmetric stress input.
pub fn evaluate_q_pointwise(spec: &QSpec, tau: &Mat, grad_u: &Mat, d: usize) -> Result<Mat> {
    let scale = frobenius(tau).max(1.0);
    let defect = asymmetry(tau);
    if defect > 1e-12 * scale {
        return Err(Error::NotSymmetric(defect));
    }
    Ok(q_pointwise(spec, tau, grad_u, d))
}

/// Reads the symmetric tensor stored at point `p`.
pub(crate) fn tensor_at(values: &[Vec<f64>], d: usize, p: usize) -> Mat {
    let mut m = ZERO;
    for i in 0..d {
        for j in 0..d {
            m[i][j] = values[sym_index(d, i, j)][p];
        }
    }
    m
}

/// Reads `∂_j u_i` at point `p` from rows indexed `[i * d + j]`.
pub(crate) fn gradient_at(values: &[Vec<f64>], d: usize, p: usize) -> Mat {
    let mut m = ZERO;
    for i in 0..d {
        for j in 0..d {
            m[i][j] = values[i * d + j][p];
        }
    }
    m
}

/// Field-level `𝒬(τ, ∇u)` with dealiased products; `u` supplies `∇u`.
pub fn evaluate_q(spec: &QSpec, tau: &SpectralField, u: &SpectralField) -> Result<SpectralField> {
    if tau.rank != Rank::SymTensor || u.rank != Rank::Vector {
        return Err(Error::RankMismatch("evaluate_q expects (symtensor, vector)".into()));
    }
    if tau.grid != u.grid {
        return Err(Error::GridMismatch);
    }
    let grid = tau.grid;
    let d = grid.d;
    let tau_phys = tau.to_physical();
    let grad = velocity_gradient_physical(u);
    let m = tau.comps.len();
    let mut out = vec![vec![0.0; grid.len()]; m];
    for p in 0..grid.len() {
        let q = q_pointwise(spec, &tensor_at(&tau_phys, d, p), &gradient_at(&grad, d, p), d);
        for i in 0..d {
            for j in i..d {
                out[sym_index(d, i, j)][p] = q[i][j];
            }
        }
    }
    let mut field = SpectralField::from_physical(grid, Rank::SymTensor, &out)?;
    field.truncate();
    Ok(field)
}

/// Time-dependent rotation of the observer frame at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameChange {
    pub d: usize,
    pub q: Mat,
    pub qdot: Mat,
}

impl FrameChange {
    /// Frame with `Q̇ = W Q` for a skew `W`.
    pub fn from_rotation(d: usize, q: Mat, w: &Mat) -> Self {
        Self { d, q, qdot: matmul(w, &q) }
    }

    pub fn validate(&self) -> Result<()> {
        let qqt = matmul(&self.q, &transpose(&self.q));
        let orth = frobenius(&sub(&qqt, &identity(self.d)));
        if orth > 1e-12 {
            return Err(Error::InvalidFrame(format!("‖QQᵀ − I‖ = {orth:.3e}")));
        }
        let s = matmul(&self.qdot, &transpose(&self.q));
        let skew = frobenius(&add(&s, &transpose(&s)));
        if skew > 1e-12 {
            return Err(Error::InvalidFrame(format!("Q̇Qᵀ not skew, defect {skew:.3e}")));
        }
        Ok(())
    }

    fn conj(&self, a: &Mat) -> Mat {
        matmul(&matmul(&self.q, a), &transpose(&self.q))
    }
}

/// Tensor rate whose frame behavior is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveDerivative {
    Material,
    Oldroyd,
    Db(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivityReport {
    /// `‖(deriv)* − Q (deriv) Qᵀ‖_F`.
    pub residual: f64,
    /// `‖Q̇τQᵀ + QτQ̇ᵀ‖_F`, reported for the material derivative.
    pub predicted_defect: Option<f64>,
}

fn derivative(kind: ObjectiveDerivative, tau: &Mat, grad_u: &Mat, rate: &Mat) -> Mat {
    let (_, om) = strain_and_vorticity(grad_u);
    let oldroyd = add(rate, &sub(&matmul(tau, &om), &matmul(&om, tau)));
    match kind {
        ObjectiveDerivative::Material => *rate,
        ObjectiveDerivative::Oldroyd => oldroyd,
        ObjectiveDerivative::Db(b) => add(rate, &q_b(b, tau, grad_u)),
    }
}

/// Evaluates a tensor rate in both frames and measures its transformation defect.
pub fn objectivity_residual(
    kind: ObjectiveDerivative,
    tau: &Mat,
    grad_u: &Mat,
    tau_rate: &Mat,
    frame: &FrameChange,
) -> Result<ObjectivityReport> {
    frame.validate()?;
    let q = &frame.q;
    let qdot = &frame.qdot;
    let qt = transpose(q);
    let tau_star = frame.conj(tau);
    // ∇u* = Q ∇u Qᵀ + Q̇ Qᵀ, so D* = QDQᵀ and Ω* = QΩQᵀ + Q̇Qᵀ.
    let grad_star = add(&frame.conj(grad_u), &matmul(qdot, &qt));
    let defect = add(&matmul(&matmul(qdot, tau), &qt), &matmul(&matmul(q, tau), &transpose(qdot)));
    let rate_star = add(&frame.conj(tau_rate), &defect);
    let lhs = derivative(kind, &tau_star, &grad_star, &rate_star);
    let rhs = frame.conj(&derivative(kind, tau, grad_u, tau_rate));
    Ok(ObjectivityReport {
        residual: frobenius(&sub(&lhs, &rhs)),
        predicted_defect: matches!(kind, ObjectiveDerivative::Material).then(|| frobenius(&defect)),
    })
}
