//! Grid, field and operator behavior against direct sums and closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use visco_spectral::checks::random_field;
use visco_spectral::field::product;
use visco_spectral::ops::{inner_product, leray_project, projected_div, relative_divergence, spectral_diff, DiffOp};
use visco_spectral::{Error, Grid, Rank, SpectralField};

fn grid2(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * PI).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn grid_rejects_invalid_shapes() {
    assert!(matches!(Grid::new(1, 16, 1.0), Err(Error::InvalidGrid(_))));
    assert!(matches!(Grid::new(2, 24, 1.0), Err(Error::InvalidGrid(_))));
    assert!(matches!(Grid::new(2, 8, 1.0), Err(Error::InvalidGrid(_))));
    assert!(matches!(Grid::new(3, 16, -1.0), Err(Error::InvalidGrid(_))));
    assert!(Grid::new(3, 16, 1.0).is_ok());
}

#[test]
fn desk_grid_geometry() {
    let g = Grid::desk();
    assert_eq!((g.d, g.n), (2, 256));
    assert!((g.dk() - 1.0 / 32.0).abs() < 1e-15);
    assert!((g.dx() - 64.0 * PI / 256.0).abs() < 1e-12);
}

#[test]
fn mode_index_inverts_mode_k() {
    let g = Grid::new(3, 16, 3.0).unwrap();
    for idx in (0..g.len()).step_by(37) {
        assert_eq!(g.mode_index(g.mode_k(idx)), idx);
    }
}

/// Direct `c_k = N⁻¹ Σ_x f(x) e^{−iξ·x}` over every point.
fn direct_dft(grid: Grid, values: &[f64]) -> Vec<Complex64> {
    let ctx = grid.context();
    let n = grid.len() as f64;
    (0..grid.len())
        .map(|k| {
            let xi = ctx.xi[k];
            let mut s = Complex64::default();
            for (p, v) in values.iter().enumerate() {
                let x = grid.point(p);
                let phase = -(xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]);
                s += *v * Complex64::new(phase.cos(), phase.sin());
            }
            s / n
        })
        .collect()
}

#[test]
fn fft_matches_direct_sum_in_2d_and_3d() {
    for grid in [Grid::new(2, 16, 5.0).unwrap(), Grid::new(3, 16, 2.0 * PI).unwrap()] {
        let f = random_field(grid, Rank::Scalar, 11);
        let phys = f.to_physical();
        let reference = direct_dft(grid, &phys[0]);
        let fresh = SpectralField::from_physical(grid, Rank::Scalar, &phys).unwrap();
        let err = fresh.comps[0]
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "grid {grid:?}: {err}");
    }
}

#[test]
fn pair_transforms_match_single_transforms() {
    let grid = grid2(32);
    let ctx = grid.context();
    let a = random_field(grid, Rank::Scalar, 1);
    let b = random_field(grid, Rank::Scalar, 2);
    let c = random_field(grid, Rank::Scalar, 3);
    let joint = ctx.to_physical(&[&a.comps[0], &b.comps[0], &c.comps[0]]);
    for (f, p) in [&a, &b, &c].iter().zip(joint.iter()) {
        assert!(max_diff(&ctx.to_physical(&[&f.comps[0]])[0], p) < 1e-14);
    }
    let back = ctx.to_spectral(&[&joint[0], &joint[1], &joint[2]]);
    for (f, s) in [&a, &b, &c].iter().zip(back.iter()) {
        let err = f.comps[0].iter().zip(s).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }
}

#[test]
fn derivatives_of_trig_field_are_exact() {
    let grid = grid2(32);
    let f = SpectralField::from_fn(grid, Rank::Scalar, |x| vec![(3.0 * x[0]).sin() * (2.0 * x[1]).cos()]);
    let grad = spectral_diff(&f, DiffOp::Grad).unwrap().to_physical();
    let lap = spectral_diff(&f, DiffOp::Laplacian).unwrap().to_physical();
    let lam = spectral_diff(&f, DiffOp::LambdaPower { sigma: 1.0, exclude_zero_mode: false })
        .unwrap()
        .to_physical();
    for p in 0..grid.len() {
        let x = grid.point(p);
        let (s3, c3, s2, c2) = ((3.0 * x[0]).sin(), (3.0 * x[0]).cos(), (2.0 * x[1]).sin(), (2.0 * x[1]).cos());
        assert!((grad[0][p] - 3.0 * c3 * c2).abs() < 1e-12);
        assert!((grad[1][p] + 2.0 * s3 * s2).abs() < 1e-12);
        assert!((lap[0][p] + 13.0 * s3 * c2).abs() < 1e-11);
        assert!((lam[0][p] - 13f64.sqrt() * s3 * c2).abs() < 1e-12);
    }
}

#[test]
fn negative_power_requires_zero_mode_exclusion() {
    let f = random_field(grid2(16), Rank::Scalar, 4);
    let op = DiffOp::LambdaPower { sigma: -1.0, exclude_zero_mode: false };
    assert!(matches!(spectral_diff(&f, op), Err(Error::ZeroModeExclusion { .. })));
    let op = DiffOp::LambdaPower { sigma: -1.0, exclude_zero_mode: true };
    assert!(spectral_diff(&f, op).is_ok());
}

#[test]
fn rank_mismatches_are_rejected() {
    let grid = grid2(16);
    let v = random_field(grid, Rank::Vector, 1);
    let s = random_field(grid, Rank::Scalar, 1);
    assert!(matches!(spectral_diff(&v, DiffOp::Grad), Err(Error::RankMismatch(_))));
    assert!(matches!(spectral_diff(&s, DiffOp::Div), Err(Error::RankMismatch(_))));
    assert!(matches!(leray_project(&s), Err(Error::RankMismatch(_))));
    assert!(matches!(projected_div(&v), Err(Error::RankMismatch(_))));
    let other = random_field(Grid::new(2, 16, 1.0).unwrap(), Rank::Scalar, 1);
    assert!(matches!(s.sub(&other), Err(Error::GridMismatch)));
}

#[test]
fn norm_is_physical_l2_norm() {
    let grid = Grid::new(2, 32, 3.0).unwrap();
    let f = random_field(grid, Rank::SymTensor, 9);
    let phys = f.to_physical();
    let cell = grid.dx().powi(2);
    // Off-diagonal stress entries appear twice in the Frobenius norm.
    let weights = [1.0, 2.0, 1.0];
    let direct: f64 = phys
        .iter()
        .zip(weights)
        .map(|(c, w)| w * c.iter().map(|v| v * v).sum::<f64>() * cell)
        .sum();
    assert!((f.norm_sq() - direct).abs() < 1e-10 * direct);
    let g = random_field(grid, Rank::SymTensor, 10);
    let gp = g.to_physical();
    let pairing: f64 = (0..3)
        .map(|c| weights[c] * phys[c].iter().zip(&gp[c]).map(|(a, b)| a * b).sum::<f64>() * cell)
        .sum();
    assert!((inner_product(&f, &g).unwrap() - pairing).abs() < 1e-10 * direct.sqrt() * g.norm());
}

#[test]
fn physical_fields_are_hermitian() {
    let f = random_field(Grid::new(3, 16, 1.0).unwrap(), Rank::Vector, 5);
    assert!(f.hermitian_defect() < 1e-14);
    assert!(f.max_imag_physical() < 1e-14);
}

#[test]
fn product_of_sines_is_exact() {
    let grid = grid2(16);
    let f = SpectralField::from_fn(grid, Rank::Scalar, |x| vec![x[0].sin()]);
    let g = SpectralField::from_fn(grid, Rank::Scalar, |x| vec![(2.0 * x[1]).cos()]);
    let p = product(&f, &f).unwrap().to_physical();
    let q = product(&f, &g).unwrap().to_physical();
    for i in 0..grid.len() {
        let x = grid.point(i);
        assert!((p[0][i] - 0.5 * (1.0 - (2.0 * x[0]).cos())).abs() < 1e-14);
        assert!((q[0][i] - x[0].sin() * (2.0 * x[1]).cos()).abs() < 1e-14);
    }
}

#[test]
fn product_drops_modes_beyond_two_thirds() {
    let grid = grid2(16);
    let f = SpectralField::from_fn(grid, Rank::Scalar, |x| vec![(4.0 * x[0]).cos()]);
    // cos² = (1 + cos 8x)/2; |k| = 8 exceeds the retained 16/3.
    let p = product(&f, &f).unwrap().to_physical();
    assert!(p[0].iter().all(|v| (v - 0.5).abs() < 1e-14));
}

#[test]
fn embedding_preserves_values_and_norm() {
    let coarse = grid2(16);
    let fine = grid2(32);
    let f = random_field(coarse, Rank::Vector, 3);
    let e = f.embed(fine).unwrap();
    assert!((e.norm() - f.norm()).abs() < 1e-12 * f.norm());
    let cp = f.to_physical();
    let fp = e.to_physical();
    // Coarse point (a, b) sits at fine point (2a, 2b).
    for a in 0..16 {
        for b in 0..16 {
            let ci = a * 16 + b;
            let fi = (2 * a) * 32 + 2 * b;
            for c in 0..2 {
                assert!((cp[c][ci] - fp[c][fi]).abs() < 1e-12);
            }
        }
    }
    assert!(matches!(e.embed(coarse), Err(Error::GridMismatch)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn physical_roundtrip(seed in 0u64..10_000, d in 2usize..=3) {
        let grid = Grid::new(d, 16, 1.7).unwrap();
        let f = random_field(grid, Rank::SymTensor, seed);
        let back = SpectralField::from_physical(grid, Rank::SymTensor, &f.to_physical()).unwrap();
        prop_assert!(back.sub(&f).unwrap().norm() <= 1e-13 * f.norm());
    }

    #[test]
    fn leray_is_idempotent_and_solenoidal(seed in 0u64..10_000, d in 2usize..=3) {
        let grid = Grid::new(d, 16, 2.0).unwrap();
        let v = random_field(grid, Rank::Vector, seed);
        let p = leray_project(&v).unwrap();
        let pp = leray_project(&p).unwrap();
        prop_assert!(pp.sub(&p).unwrap().norm() <= 1e-13 * p.norm());
        prop_assert!(relative_divergence(&p).unwrap() <= 1e-13);
        prop_assert!(p.norm() <= v.norm() * (1.0 + 1e-14));
    }

    #[test]
    fn leray_annihilates_gradients(seed in 0u64..10_000) {
        let grid = grid2(16);
        let phi = random_field(grid, Rank::Scalar, seed);
        let g = spectral_diff(&phi, DiffOp::Grad).unwrap();
        prop_assert!(leray_project(&g).unwrap().norm() <= 1e-13 * g.norm());
    }

    #[test]
    fn projected_divergence_is_solenoidal(seed in 0u64..10_000) {
        let tau = random_field(grid2(16), Rank::SymTensor, seed);
        let w = projected_div(&tau).unwrap();
        prop_assert!(relative_divergence(&w).unwrap() <= 1e-13);
    }

    #[test]
    fn laplacian_is_negative_semidefinite(seed in 0u64..10_000) {
        let f = random_field(grid2(16), Rank::Scalar, seed);
        let lap = spectral_diff(&f, DiffOp::Laplacian).unwrap();
        prop_assert!(inner_product(&f, &lap).unwrap() <= 0.0);
    }
}
