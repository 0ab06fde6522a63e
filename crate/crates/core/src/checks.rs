//! Identity suite: projection, partition of unity, paraproduct
//! reconstruction, the commutator identity, frame objectivity and the
//! Johnson–Segalman reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constitutive::{
    frobenius, objectivity_residual, q_pointwise, sub, FrameChange, Mat, ObjectiveDerivative, QSpec,
};
use crate::error::Result;
use crate::field::{Rank, SpectralField};
use crate::grid::Grid;
use crate::lp::{bony_decompose, build_filter_bank, pointwise_product};
use crate::ops::{b_identity_residual, leray_project, spectral_diff, DiffOp};
use crate::solver::{make_initial_data, InitialDataSpec};

/// One measured identity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckLine {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

/// Truncated white-noise field of the given rank.
pub fn random_field(grid: Grid, rank: Rank, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rank.components(grid.d);
    let values: Vec<Vec<f64>> = (0..m).map(|_| (0..grid.len()).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let mut f = SpectralField::from_physical(grid, rank, &values).expect("component count matches rank");
    f.truncate();
    f
}

/// Random matrix with independent standard normal entries in the leading `d × d` block.
pub fn random_mat(rng: &mut ChaCha8Rng, d: usize, symmetric: bool) -> Mat {
    let mut m = [[0.0; 3]; 3];
    for i in 0..d {
        for j in 0..d {
            m[i][j] = rng.sample(StandardNormal);
        }
    }
    if symmetric {
        for i in 0..d {
            for j in 0..i {
                m[i][j] = m[j][i];
            }
        }
    }
    m
}

/// Random rotation (Gram–Schmidt of a Gaussian matrix) and random skew rate.
pub fn random_frame(rng: &mut ChaCha8Rng, d: usize) -> FrameChange {
    let a = random_mat(rng, d, false);
    let mut q = [[0.0; 3]; 3];
    for i in 0..d {
        let mut v = a[i];
        for k in 0..i {
            let dot: f64 = (0..d).map(|c| v[c] * q[k][c]).sum();
            for c in 0..d {
                v[c] -= dot * q[k][c];
            }
        }
        let n: f64 = (0..d).map(|c| v[c] * v[c]).sum::<f64>().sqrt();
        for c in 0..d {
            q[i][c] = v[c] / n;
        }
    }
    let s = random_mat(rng, d, false);
    let mut w = [[0.0; 3]; 3];
    for i in 0..d {
        for j in 0..d {
            w[i][j] = 0.5 * (s[i][j] - s[j][i]);
        }
    }
    FrameChange::from_rotation(d, q, &w)
}

fn rel(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Runs the identity suite on a 2D grid with `n` points per axis.
pub fn identity_suite(n: usize, seed: u64) -> Result<Vec<CheckLine>> {
    let grid = Grid::new(2, n, 2.0 * std::f64::consts::PI)?;
    let mut lines = Vec::new();

    let v = random_field(grid, Rank::Vector, seed);
    let pv = leray_project(&v)?;
    let ppv = leray_project(&pv)?;
    lines.push(CheckLine::new("leray_idempotence", rel(ppv.sub(&pv)?.norm(), pv.norm()), 1e-12));
    let phi = random_field(grid, Rank::Scalar, seed + 1);
    let grad = spectral_diff(&phi, DiffOp::Grad)?;
    lines.push(CheckLine::new("leray_gradient_annihilation", rel(leray_project(&grad)?.norm(), grad.norm()), 1e-12));

    let bank = build_filter_bank(grid, 1.0)?;
    lines.push(CheckLine::new("partition_of_unity", bank.partition_defect(), 1e-10));

    let f = random_field(grid, Rank::Scalar, seed + 2);
    let g = random_field(grid, Rank::Scalar, seed + 3);
    let (tfg, tgf, r) = bony_decompose(&bank, &f, &g)?;
    let prod = pointwise_product(&f, &g)?;
    let mut sum = tfg.clone();
    sum.axpy(1.0, &tgf)?;
    sum.axpy(1.0, &r)?;
    lines.push(CheckLine::new("bony_reconstruction", rel(sum.sub(&prod)?.norm(), prod.norm()), 1e-10));

    let spec = InitialDataSpec { seed: seed + 4, low_slope: 0.0, high_slope: -2.0, ..Default::default() };
    let (u, tau) = make_initial_data(grid, &spec)?;
    lines.push(CheckLine::new("commutator_identity", b_identity_residual(&u, &tau)?, 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(seed + 5);
    let mut worst_oldroyd: f64 = 0.0;
    let mut worst_db: f64 = 0.0;
    let mut worst_material: f64 = 0.0;
    let mut worst_js: f64 = 0.0;
    for trial in 0..50 {
        let d = 2 + trial % 2;
        let tau = random_mat(&mut rng, d, true);
        let grad_u = random_mat(&mut rng, d, false);
        let rate = random_mat(&mut rng, d, true);
        let frame = random_frame(&mut rng, d);
        let b: f64 = rng.gen_range(-1.0..=1.0);
        let scale = frobenius(&tau) * (1.0 + frobenius(&grad_u) + frobenius(&frame.qdot)) + frobenius(&rate);
        let o = objectivity_residual(ObjectiveDerivative::Oldroyd, &tau, &grad_u, &rate, &frame)?;
        worst_oldroyd = worst_oldroyd.max(o.residual / scale);
        let o = objectivity_residual(ObjectiveDerivative::Db(b), &tau, &grad_u, &rate, &frame)?;
        worst_db = worst_db.max(o.residual / scale);
        let o = objectivity_residual(ObjectiveDerivative::Material, &tau, &grad_u, &rate, &frame)?;
        let predicted = o.predicted_defect.unwrap_or(f64::NAN);
        worst_material = worst_material.max((o.residual - predicted).abs() / scale);
        let js = q_pointwise(&QSpec::JohnsonSegalman { a: b }, &tau, &grad_u, d);
        let db = q_pointwise(&QSpec::OldroydB { b }, &tau, &grad_u, d);
        worst_js = worst_js.max(frobenius(&sub(&js, &db)) / scale);
    }
    lines.push(CheckLine::new("objectivity_oldroyd", worst_oldroyd, 1e-12));
    lines.push(CheckLine::new("objectivity_db", worst_db, 1e-12));
    lines.push(CheckLine::new("material_defect_match", worst_material, 1e-12));
    lines.push(CheckLine::new("johnson_segalman_equals_db", worst_js, 1e-12));
    Ok(lines)
}
