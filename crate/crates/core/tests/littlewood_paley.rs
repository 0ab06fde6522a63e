//! Dyadic profile, filter bank, hybrid norms, paraproducts and audits.

use std::f64::consts::PI;

use proptest::prelude::*;
use visco_spectral::checks::random_field;
use visco_spectral::lp::*;
use visco_spectral::{Error, Grid, Rank, SpectralField};

fn grid2(n: usize) -> Grid {
    Grid::new(2, n, 2.0 * PI).unwrap()
}

#[test]
fn cutoff_and_annulus_support() {
    for s in [0.5, 1.0, 3.0] {
        assert_eq!(chi(0.0, s), 1.0);
        assert_eq!(chi(0.75, s), 1.0);
        assert_eq!(chi(4.0 / 3.0, s), 0.0);
        assert_eq!(chi(5.0, s), 0.0);
        assert_eq!(phi(0.5, s), 0.0);
        assert_eq!(phi(0.74, s), 0.0);
        assert_eq!(phi(2.7, s), 0.0);
        // χ(r/2) = 1 and χ(r) = 0 on [4/3, 3/2].
        assert_eq!(phi(1.4, s), 1.0);
    }
}

#[test]
fn desk_bank_spans_expected_indices() {
    let bank = build_filter_bank(Grid::desk(), 1.0).unwrap();
    assert_eq!((bank.j_min, bank.j_max), (-6, 2));
    // The lowest mode |ξ| = 1/32 sits inside the j = −6 annulus [3/4, 8/3]·2^{−6}.
    let r = 1.0 / 32.0 * 64.0;
    assert!((0.75..=8.0 / 3.0).contains(&r));
    assert!(bank.partition_defect() <= 1e-10);
    assert!(bank.count() >= 7);
}

#[test]
fn bank_rejects_bad_sharpness_and_indices() {
    let g = grid2(16);
    assert!(matches!(build_filter_bank(g, 0.0), Err(Error::InvalidParameter(_))));
    let bank = build_filter_bank(g, 1.0).unwrap();
    let f = random_field(g, Rank::Scalar, 1);
    assert!(matches!(dyadic_block(&bank, &f, bank.j_max + 1), Err(Error::DyadicRange { .. })));
    let other = random_field(Grid::new(2, 16, 1.0).unwrap(), Rank::Scalar, 1);
    assert!(matches!(bank.block_energies(&other), Err(Error::GridMismatch)));
}

#[test]
fn single_mode_blocks_follow_the_profile() {
    let g = grid2(32);
    let bank = build_filter_bank(g, 1.0).unwrap();
    // |ξ| = 4: the j = 3 annulus sees 2^{−3}·4 = 0.5, outside [3/4, 8/3].
    // cos(4x) built directly from its two coefficients.
    let mut f = SpectralField::zeros(g, Rank::Scalar);
    f.comps[0][g.mode_index([4, 0, 0])] = 0.5.into();
    f.comps[0][g.mode_index([-4, 0, 0])] = 0.5.into();
    assert_eq!(dyadic_block(&bank, &f, 3).unwrap().max_abs_coeff(), 0.0);
    assert_eq!(dyadic_block(&bank, &f, 0).unwrap().max_abs_coeff(), 0.0);
    let energies = bank.block_energies(&f).unwrap();
    let total = f.norm_sq();
    for j in bank.indices() {
        let expected = phi(4.0 * (-j as f64).exp2(), 1.0).powi(2) * total;
        assert!((energies[(j - bank.j_min) as usize] - expected).abs() <= 1e-13 * total);
    }
    // At j = 2, 2^{−2}·4 = 1 lies in the overlap with j = 1; the two blocks add up to f.
    let mut pair = dyadic_block(&bank, &f, 1).unwrap();
    pair.axpy(1.0, &dyadic_block(&bank, &f, 2).unwrap()).unwrap();
    assert!(pair.sub(&f).unwrap().norm() < 1e-14);
    // |ξ| = 11 gives 2^{−3}·11 = 1.375, where the profile is exactly 1.
    let mut h = SpectralField::zeros(g, Rank::Scalar);
    h.comps[0][g.mode_index([11, 0, 0])] = 1.0.into();
    assert_eq!(dyadic_block(&bank, &h, 3).unwrap(), h);
}

#[test]
fn hybrid_norm_of_single_mode_matches_direct_weighting() {
    let g = grid2(32);
    let bank = build_filter_bank(g, 1.0).unwrap();
    let f = SpectralField::from_fn(g, Rank::Scalar, |x| vec![(3.0 * x[0]).sin() + (5.0 * x[1]).cos()]);
    let spec = BesovSpec::new(-0.5, 1.5, 1);
    let mut direct = 0.0;
    for j in bank.indices() {
        let w = if j <= 1 { (-0.5 * j as f64).exp2() } else { (1.5 * j as f64).exp2() };
        let p3 = phi(3.0 * (-j as f64).exp2(), 1.0);
        let p5 = phi(5.0 * (-j as f64).exp2(), 1.0);
        // Each unit mode pair carries L²-mass L²/2.
        let e = (p3 * p3 + p5 * p5) * 0.5 * (2.0 * PI).powi(2);
        direct += w * e.sqrt();
    }
    let got = hybrid_besov_norm(&bank, &f, &spec).unwrap();
    assert!((got - direct).abs() < 1e-12 * direct);
    let parts = hybrid_besov_parts(&bank, &f, &spec).unwrap();
    assert!((parts.low + parts.high - parts.total).abs() < 1e-14 * got);
    assert!(parts.tail_mass < 1e-15);
}

#[test]
fn blocks_reconstruct_field_without_mean() {
    let g = grid2(32);
    let bank = build_filter_bank(g, 1.0).unwrap();
    let mut f = random_field(g, Rank::Vector, 7);
    for c in f.comps.iter_mut() {
        c[0] = Default::default();
    }
    let mut sum = SpectralField::zeros(g, Rank::Vector);
    for j in bank.indices() {
        sum.axpy(1.0, &dyadic_block(&bank, &f, j).unwrap()).unwrap();
    }
    assert!(sum.sub(&f).unwrap().norm() < 1e-12 * f.norm());
    let lp = low_pass(&bank, &f, bank.j_max + 1).unwrap();
    assert!(lp.sub(&f).unwrap().norm() < 1e-12 * f.norm());
}

#[test]
fn interpolation_and_embedding_audits_hold() {
    let g = grid2(32);
    let bank = build_filter_bank(g, 1.0).unwrap();
    let ensemble: Vec<_> = (0..10)
        .map(|s| (random_field(g, Rank::Scalar, 2 * s), random_field(g, Rank::Scalar, 2 * s + 1)))
        .collect();
    let lines = besov_inequality_audit(&bank, &ensemble).unwrap();
    for line in &lines {
        assert!(line.holds(1e-10), "{line:?}");
        assert_eq!(line.samples + line.skipped, if line.name.starts_with("product") { 10 } else { 20 });
    }
    assert!(besov_inequality_audit(&bank, &[]).is_err());
}

#[test]
fn embedding_constant_closed_form() {
    let from = BesovSpec::new(0.0, 2.0, 0);
    let to = BesovSpec::new(1.0, 1.0, 0);
    assert_eq!(embedding_constant(&from, &to), 1.0);
    let from = BesovSpec::new(0.0, 2.0, 3);
    assert_eq!(embedding_constant(&from, &to), 8.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_values_in_unit_interval(r in 0.0f64..10.0, s in 0.1f64..5.0) {
        let v = phi(r, s);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((0.0..=1.0).contains(&chi(r, s)));
    }

    #[test]
    fn cutoff_is_nonincreasing(r in 0.0f64..2.0, dr in 0.0f64..0.5, s in 0.1f64..5.0) {
        prop_assert!(chi(r + dr, s) <= chi(r, s));
    }

    #[test]
    fn dyadic_profiles_sum_to_one(log_r in -20.0f64..20.0, s in 0.1f64..5.0) {
        let r = log_r.exp2();
        let total: f64 = (-40..=40).map(|j| phi(r * (-(j as f64)).exp2(), s)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn block_energies_bracket_l2_mass(seed in 0u64..5_000) {
        let g = grid2(32);
        let bank = build_filter_bank(g, 1.0).unwrap();
        let mut f = random_field(g, Rank::Scalar, seed);
        f.comps[0][0] = Default::default();
        let total: f64 = bank.block_energies(&f).unwrap().iter().sum();
        let mass = f.norm_sq();
        prop_assert!(total <= mass * (1.0 + 1e-12));
        prop_assert!(total >= 0.5 * mass * (1.0 - 1e-12));
    }

    #[test]
    fn equal_regularities_ignore_cutoff(seed in 0u64..5_000, s in -1.0f64..3.0, j0 in -3i32..4) {
        let g = grid2(16);
        let bank = build_filter_bank(g, 1.0).unwrap();
        let f = random_field(g, Rank::Vector, seed);
        let a = hybrid_besov_norm(&bank, &f, &BesovSpec::new(s, s, j0)).unwrap();
        let b = hybrid_besov_norm(&bank, &f, &BesovSpec::homogeneous(s)).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn explicit_embedding_constant_is_never_violated(seed in 0u64..5_000, j0 in -2i32..3) {
        let g = grid2(32);
        let bank = build_filter_bank(g, 1.0).unwrap();
        let f = random_field(g, Rank::Scalar, seed);
        let from = BesovSpec::new(0.0, 2.0, j0);
        let to = BesovSpec::new(1.0, 1.0, j0);
        let lhs = hybrid_besov_norm(&bank, &f, &to).unwrap();
        let rhs = embedding_constant(&from, &to) * hybrid_besov_norm(&bank, &f, &from).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn paraproducts_reconstruct_product(seed in 0u64..5_000) {
        let g = grid2(32);
        let bank = build_filter_bank(g, 1.0).unwrap();
        let f = random_field(g, Rank::Scalar, seed);
        let h = random_field(g, Rank::Scalar, seed + 1);
        let (a, b, r) = bony_decompose(&bank, &f, &h).unwrap();
        let mut sum = a;
        sum.axpy(1.0, &b).unwrap();
        sum.axpy(1.0, &r).unwrap();
        let p = pointwise_product(&f, &h).unwrap();
        prop_assert!(sum.sub(&p).unwrap().norm() <= 1e-10 * p.norm());
    }
}
