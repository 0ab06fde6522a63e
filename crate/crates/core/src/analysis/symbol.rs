//! Linearized symbol in the variables `(û, ŵ)` with `w = ℙ div τ`.

use num_complex::Complex64;
use crate::solver::{Case, ModelParams};

/// 2×2 real symbol of the linearized system at one frequency magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSymbol {
    pub case: Case,
    pub xi_mag: f64,
    pub matrix: [[f64; 2]; 2],
    /// Ordered so that `eigenvalues[0]` is the slow branch (larger real part).
    pub eigenvalues: [Complex64; 2],
    /// True when both eigenvalues are real, so slow and fast branches separate.
    pub real_split: bool,
}

impl LinearSymbol {
    pub fn slow(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    pub fn fast(&self) -> Complex64 {
        self.eigenvalues[1]
    }
}

/// Rows `u_t = −ν₁|ξ|²u + w` and `w_t = −(μ/2)|ξ|²u − (α + ν₂|ξ|²)w`.
pub fn linear_symbol(params: &ModelParams, xi_mag: f64) -> LinearSymbol {
    let r2 = xi_mag * xi_mag;
    let matrix = [
        [-params.nu1 * r2, 1.0],
        [-0.5 * params.mu * r2, -(params.alpha + params.nu2 * r2)],
    ];
    let tr = matrix[0][0] + matrix[1][1];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let disc = 0.25 * tr * tr - det;
    let (eigenvalues, real_split) = if disc >= 0.0 {
        let s = disc.sqrt();
        // The root of larger modulus first, the other from the product `det`.
        let sgn = if tr > 0.0 { 1.0 } else { -1.0 };
        let big = 0.5 * tr + sgn * s;
        let other = if big != 0.0 { det / big } else { 0.0 };
        let (a, b) = if big >= other { (big, other) } else { (other, big) };
        ([Complex64::new(a, 0.0), Complex64::new(b, 0.0)], true)
    } else {
        let s = (-disc).sqrt();
        ([Complex64::new(0.5 * tr, s), Complex64::new(0.5 * tr, -s)], false)
    };
    LinearSymbol { case: params.case, xi_mag, matrix, eigenvalues, real_split }
}

/// Symbols at `count` log-spaced magnitudes in `[lo, hi]`.
pub fn dispersion_sweep(params: &ModelParams, lo: f64, hi: f64, count: usize) -> Vec<LinearSymbol> {
    let count = count.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| linear_symbol(params, (a + (b - a) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}
