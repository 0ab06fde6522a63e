//! Littlewood–Paley dyadic blocks, hybrid Besov norms, Bony paraproducts and
//! numerical audits of the standard Besov inequalities.
//!
//! The annulus profile is `φ(r) = χ(r/2) − χ(r)` where `χ` is a smooth radial
//! cut-off equal to 1 on `[0, 3/4]` and 0 on `[4/3, ∞)`. The truncated sum
//! over `[j_min, j_max]` telescopes to `χ(2^{-j_max-1}r) − χ(2^{-j_min}r)`, which
//! is exactly 1 on the resolvable band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sym_weight, Rank, SpectralField};
use crate::grid::{DealiasRule, Grid};

/// Smooth cut-off `χ(r)`: 1 for `r ≤ 3/4`, 0 for `r ≥ 4/3`.
///
/// The transition is the quotient step `g(1−x)/(g(x)+g(1−x))` with
/// `g(x) = exp(−σ/x)`; larger `σ` steepens the middle of the transition.
pub fn chi(r: f64, sharpness: f64) -> f64 {
    const LO: f64 = 0.75;
    const HI: f64 = 4.0 / 3.0;
    if r <= LO {
        return 1.0;
    }
    if r >= HI {
        return 0.0;
    }
    let x = (r - LO) / (HI - LO);
    let g = |y: f64| if y <= 0.0 { 0.0 } else { (-sharpness / y).exp() };
    let a = g(1.0 - x);
    let b = g(x);
    a / (a + b)
}

/// Annulus profile `φ(r) = χ(r/2) − χ(r)`, supported on `[3/4, 8/3]`.
pub fn phi(r: f64, sharpness: f64) -> f64 {
    chi(0.5 * r, sharpness) - chi(r, sharpness)
}

/// Hybrid regularity pair `(s, t)` with cut-off `j0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub t: f64,
    pub j0: i32,
}

impl BesovSpec {
    pub fn new(s: f64, t: f64, j0: i32) -> Self {
        Self { s, t, j0 }
    }

    /// Plain homogeneous `Ḃ^s_{2,1}`.
    pub fn homogeneous(s: f64) -> Self {
        Self { s, t: s, j0: 0 }
    }

    pub fn weight(&self, j: i32) -> f64 {
        let e = if j <= self.j0 { self.s } else { self.t };
        (j as f64 * e).exp2()
    }
}

/// Low, high and total parts of a hybrid norm plus spectral tail mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParts {
    pub low: f64,
    pub high: f64,
    pub total: f64,
    pub tail_mass: f64,
}

/// Tabulated dyadic multipliers on a grid.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub grid: Grid,
    pub sharpness: f64,
    pub j_min: i32,
    pub j_max: i32,
    /// `multipliers[j - j_min][mode]`.
    pub multipliers: Vec<Vec<f64>>,
    /// Nonzero `(j - j_min, φ)` entries per mode.
    sparse: Vec<Vec<(usize, f64)>>,
    /// Modes whose partition sum deviates from 1 (outside the resolvable band).
    uncovered: Vec<bool>,
}

pub const MIN_ANNULI: usize = 4;

pub fn build_filter_bank(grid: Grid, sharpness: f64) -> Result<FilterBank> {
    if !(sharpness.is_finite() && sharpness > 0.0) {
        return Err(Error::InvalidParameter(format!("profile sharpness {sharpness} must be positive")));
    }
    let ctx = grid.context();
    let xi_min = grid.dk();
    let kmax = DealiasRule::default().cutoff(grid.n).floor();
    let xi_max = (grid.d as f64).sqrt() * kmax * grid.dk();
    let j_min = (0.75 * xi_min).log2().floor() as i32;
    let j_max = (2.0 * xi_max / 3.0).log2().ceil() as i32;
    let count = (j_max - j_min + 1).max(0) as usize;
    if count < MIN_ANNULI {
        return Err(Error::TooFewAnnuli { found: count, required: MIN_ANNULI });
    }
    let len = grid.len();
    let mut multipliers = vec![vec![0.0; len]; count];
    let mut sparse = vec![Vec::new(); len];
    let mut uncovered = vec![false; len];
    for idx in 0..len {
        let r = ctx.xi2[idx].sqrt();
        if r == 0.0 {
            continue;
        }
        let mut total = 0.0;
        for (jj, row) in multipliers.iter_mut().enumerate() {
            let j = j_min + jj as i32;
            let v = phi(r * (-j as f64).exp2(), sharpness);
            if v != 0.0 {
                row[idx] = v;
                sparse[idx].push((jj, v));
                total += v;
            }
        }
        uncovered[idx] = (total - 1.0).abs() > 1e-10;
    }
    Ok(FilterBank { grid, sharpness, j_min, j_max, multipliers, sparse, uncovered })
}

impl FilterBank {
    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    fn slot(&self, j: i32) -> Result<usize> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::DyadicRange { j, j_min: self.j_min, j_max: self.j_max });
        }
        Ok((j - self.j_min) as usize)
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Largest deviation of `Σ_j φ(2^{-j}ξ)` from 1 over the resolvable band.
    pub fn partition_defect(&self) -> f64 {
        let ctx = self.grid.context();
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            if ctx.xi2[idx] == 0.0 || !ctx.keep[idx] {
                continue;
            }
            let total: f64 = self.sparse[idx].iter().map(|(_, v)| v).sum();
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }

    /// `Σ_j φ_j(ξ)²` style accumulation: returns `L^d Σ_k φ_j(k)² q_k` for each j.
    pub fn bin_sum(&self, per_mode: &[f64]) -> Vec<f64> {
        let mut bins = vec![0.0; self.count()];
        for (idx, q) in per_mode.iter().enumerate() {
            if *q == 0.0 {
                continue;
            }
            for &(jj, v) in &self.sparse[idx] {
                bins[jj] += v * v * q;
            }
        }
        let vol = self.grid.volume();
        bins.iter_mut().for_each(|b| *b *= vol);
        bins
    }

    /// Nonzero `(slot, φ)` pairs of one mode.
    pub(crate) fn sparse_entries(&self, idx: usize) -> &[(usize, f64)] {
        &self.sparse[idx]
    }

    /// Squared block norms `‖Δ_j f‖²` for every resolvable j.
    pub fn block_energies(&self, f: &SpectralField) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        Ok(self.bin_sum(&mode_energy(f)))
    }

    /// Relative L² mass of non-zero modes the bank does not cover.
    pub fn tail_mass(&self, f: &SpectralField) -> Result<f64> {
        self.check_grid(f)?;
        let ctx = self.grid.context();
        let e = mode_energy(f);
        let mut total = 0.0;
        let mut tail = 0.0;
        for (idx, q) in e.iter().enumerate() {
            if ctx.xi2[idx] == 0.0 {
                continue;
            }
            total += q;
            if self.uncovered[idx] {
                tail += q;
            }
        }
        Ok(if total == 0.0 { 0.0 } else { tail / total })
    }
}

/// Per-mode `Σ_c w_c |f̂_c|²` (Frobenius weights for tensors).
pub fn mode_energy(f: &SpectralField) -> Vec<f64> {
    let d = f.grid.d;
    let mut out = vec![0.0; f.grid.len()];
    for (ci, c) in f.comps.iter().enumerate() {
        let w = if f.rank == Rank::SymTensor { sym_weight(d, ci) } else { 1.0 };
        for (o, z) in out.iter_mut().zip(c.iter()) {
            *o += w * z.norm_sqr();
        }
    }
    out
}

/// `Δ_j f`.
pub fn dyadic_block(bank: &FilterBank, f: &SpectralField, j: i32) -> Result<SpectralField> {
    bank.check_grid(f)?;
    let slot = bank.slot(j)?;
    let m = &bank.multipliers[slot];
    let mut out = f.clone();
    for c in out.comps.iter_mut() {
        for (z, w) in c.iter_mut().zip(m.iter()) {
            *z *= *w;
        }
    }
    Ok(out)
}

/// `S_j f = Σ_{j_min ≤ j' < j} Δ_{j'} f`.
pub fn low_pass(bank: &FilterBank, f: &SpectralField, j: i32) -> Result<SpectralField> {
    bank.check_grid(f)?;
    let mut out = SpectralField::zeros(f.grid, f.rank);
    for jp in bank.j_min..j.min(bank.j_max + 1) {
        out.axpy(1.0, &dyadic_block(bank, f, jp)?)?;
    }
    Ok(out)
}

fn parts_from_energies(bank: &FilterBank, energies: &[f64], spec: &BesovSpec) -> (f64, f64) {
    let mut low = 0.0;
    let mut high = 0.0;
    for (jj, e) in energies.iter().enumerate() {
        let j = bank.j_min + jj as i32;
        let v = spec.weight(j) * e.max(0.0).sqrt();
        if j <= spec.j0 {
            low += v;
        } else {
            high += v;
        }
    }
    (low, high)
}

/// Hybrid norm `Σ_{j≤j0} 2^{js}‖Δ_j f‖ + Σ_{j>j0} 2^{jt}‖Δ_j f‖`.
pub fn hybrid_besov_norm(bank: &FilterBank, f: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    Ok(hybrid_besov_parts(bank, f, spec)?.total)
}

/// Low and high parts of the hybrid norm with the uncovered tail mass.
pub fn hybrid_besov_parts(bank: &FilterBank, f: &SpectralField, spec: &BesovSpec) -> Result<NormParts> {
    let energies = bank.block_energies(f)?;
    let (low, high) = parts_from_energies(bank, &energies, spec);
    Ok(NormParts { low, high, total: low + high, tail_mass: bank.tail_mass(f)? })
}

/// Hybrid norm from precomputed block energies.
pub fn hybrid_from_energies(bank: &FilterBank, energies: &[f64], spec: &BesovSpec) -> f64 {
    let (l, h) = parts_from_energies(bank, energies, spec);
    l + h
}

/// `sup_j w_j ‖Δ_j f‖` with hybrid weights (the `q = ∞` variant).
pub fn hybrid_besov_sup_norm(bank: &FilterBank, f: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    let energies = bank.block_energies(f)?;
    Ok(energies
        .iter()
        .enumerate()
        .map(|(jj, e)| spec.weight(bank.j_min + jj as i32) * e.max(0.0).sqrt())
        .fold(0.0, f64::max))
}

/// Bony decomposition `fg = 𝒯_f g + 𝒯_g f + ℛ(f, g)`, applied component-wise.
pub fn bony_decompose(
    bank: &FilterBank,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    bank.check_grid(f)?;
    f.check_same(g)?;
    let mut tfg = SpectralField::zeros(f.grid, f.rank);
    let mut tgf = SpectralField::zeros(f.grid, f.rank);
    let mut rem = SpectralField::zeros(f.grid, f.rank);
    for c in 0..f.comps.len() {
        let (a, b, r) = bony_scalar(bank, &f.comps[c], &g.comps[c]);
        tfg.comps[c] = a;
        tgf.comps[c] = b;
        rem.comps[c] = r;
    }
    Ok((tfg, tgf, rem))
}

type Coeffs = Vec<num_complex::Complex64>;

fn bony_scalar(bank: &FilterBank, f: &[num_complex::Complex64], g: &[num_complex::Complex64]) -> (Coeffs, Coeffs, Coeffs) {
    let ctx = bank.grid.context();
    let len = bank.grid.len();
    let blocks = |h: &[num_complex::Complex64]| -> Vec<Vec<f64>> {
        let spec: Vec<Coeffs> = bank
            .multipliers
            .iter()
            .map(|m| h.iter().zip(m.iter()).map(|(z, w)| *z * *w).collect())
            .collect();
        let refs: Vec<&[num_complex::Complex64]> = spec.iter().map(|c| c.as_slice()).collect();
        ctx.to_physical(&refs)
    };
    let df = blocks(f);
    let dg = blocks(g);
    let count = bank.count();
    let mut tfg = vec![0.0; len];
    let mut tgf = vec![0.0; len];
    // The mean is not in any annulus; it joins the low-frequency cut-offs and
    // its self-interaction goes to the remainder.
    let (f0, g0) = (f[0].re, g[0].re);
    let mut sf = vec![f0; len];
    let mut sg = vec![g0; len];
    let mut rem = vec![f0 * g0; len];
    // At step jj, sf/sg hold S_{j-1} = mean + Σ_{j' ≤ j-2} Δ_{j'}.
    for jj in 0..count {
        if jj >= 2 {
            for p in 0..len {
                sf[p] += df[jj - 2][p];
                sg[p] += dg[jj - 2][p];
            }
        }
        for p in 0..len {
            tfg[p] += sf[p] * dg[jj][p];
            tgf[p] += sg[p] * df[jj][p];
        }
        for kk in jj.saturating_sub(1)..(jj + 2).min(count) {
            for p in 0..len {
                rem[p] += df[jj][p] * dg[kk][p];
            }
        }
    }
    let mut out = ctx.to_spectral(&[&tfg, &tgf, &rem]);
    for c in out.iter_mut() {
        ctx.truncate(c);
    }
    let rem = out.pop().unwrap();
    let tgf = out.pop().unwrap();
    let tfg = out.pop().unwrap();
    (tfg, tgf, rem)
}

/// Worst observed ratio for one audited inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditLine {
    pub name: String,
    /// Proven bound on the ratio, when the inequality has an explicit constant.
    pub bound: Option<f64>,
    pub worst_ratio: f64,
    pub samples: usize,
    pub skipped: usize,
}

impl AuditLine {
    fn new(name: &str, bound: Option<f64>) -> Self {
        Self { name: name.into(), bound, worst_ratio: 0.0, samples: 0, skipped: 0 }
    }

    fn record(&mut self, num: f64, den: f64) {
        if den == 0.0 || !den.is_finite() {
            self.skipped += 1;
            return;
        }
        self.samples += 1;
        self.worst_ratio = self.worst_ratio.max(num / den);
    }

    /// True when an explicit bound exists and holds up to `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        match self.bound {
            Some(b) => self.worst_ratio <= b * (1.0 + slack),
            None => self.worst_ratio.is_finite(),
        }
    }
}

/// Explicit embedding constant `max(2^{j0(s2−s1)}, 2^{(j0+1)(t2−t1)})`.
pub fn embedding_constant(from: &BesovSpec, to: &BesovSpec) -> f64 {
    let j0 = from.j0 as f64;
    ((j0 * (to.s - from.s)).exp2()).max(((j0 + 1.0) * (to.t - from.t)).exp2())
}

/// Audits interpolation, embedding and product inequalities over an ensemble.
pub fn besov_inequality_audit(
    bank: &FilterBank,
    ensemble: &[(SpectralField, SpectralField)],
) -> Result<Vec<AuditLine>> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("audit ensemble is empty".into()));
    }
    let half_d = bank.grid.d as f64 / 2.0;
    let s1 = half_d - 1.0;
    let s2 = half_d + 1.0;
    let mid = BesovSpec::homogeneous(0.5 * (s1 + s2));
    let b1 = BesovSpec::homogeneous(s1);
    let b2 = BesovSpec::homogeneous(s2);
    let from = BesovSpec::new(half_d - 1.0, half_d + 1.0, 0);
    let to = BesovSpec::new(half_d, half_d, 0);
    let c_emb = embedding_constant(&from, &to);
    let crit = BesovSpec::homogeneous(half_d);
    let sp = 0.5 * half_d;

    let mut interp = AuditLine::new("interpolation_theta_half", Some(1.0));
    let mut interp_low = AuditLine::new("interpolation_theta_half_low_part", Some(1.0));
    let mut embed = AuditLine::new("embedding_explicit_constant", Some(1.0));
    let mut interp2 = AuditLine::new("interpolation_lp_bound", None);
    let mut prod = AuditLine::new("product_critical", None);
    let mut prod_hybrid = AuditLine::new("product_hybrid", None);

    for (f, g) in ensemble {
        for h in [f, g] {
            let e = bank.block_energies(h)?;
            let n_mid = hybrid_from_energies(bank, &e, &mid);
            let n1 = hybrid_from_energies(bank, &e, &b1);
            let n2 = hybrid_from_energies(bank, &e, &b2);
            interp.record(n_mid, (n1 * n2).sqrt());
            let low = |s: &BesovSpec| {
                parts_from_energies(bank, &e, &BesovSpec::new(s.s, s.t, 0)).0
            };
            interp_low.record(low(&mid), (low(&b1) * low(&b2)).sqrt());
            embed.record(hybrid_from_energies(bank, &e, &to), c_emb * hybrid_from_energies(bank, &e, &from));
            let theta = sp / half_d;
            let l2_norm = h.norm();
            interp2.record(
                hybrid_from_energies(bank, &e, &BesovSpec::homogeneous(sp)),
                l2_norm.powf(1.0 - theta) * hybrid_from_energies(bank, &e, &crit).powf(theta),
            );
        }
        let fg = pointwise_product(f, g)?;
        let e_fg = bank.block_energies(&fg)?;
        let e_f = bank.block_energies(f)?;
        let e_g = bank.block_energies(g)?;
        prod.record(
            hybrid_from_energies(bank, &e_fg, &crit),
            hybrid_from_energies(bank, &e_f, &crit) * hybrid_from_energies(bank, &e_g, &crit),
        );
        let hyb = BesovSpec::new(half_d - 1.0, half_d, 0);
        prod_hybrid.record(
            hybrid_from_energies(bank, &e_fg, &hyb),
            hybrid_from_energies(bank, &e_f, &hyb) * hybrid_from_energies(bank, &e_g, &crit),
        );
    }
    Ok(vec![interp, interp_low, embed, interp2, prod, prod_hybrid])
}

/// Component-wise dealiased product of two fields of equal rank.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    let mut out = SpectralField::zeros(f.grid, f.rank);
    for c in 0..f.comps.len() {
        let p = crate::field::product(&f.component(c), &g.component(c))?;
        out.comps[c] = p.comps.into_iter().next().unwrap();
    }
    Ok(out)
}
