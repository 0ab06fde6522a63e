//! Per-annulus energy functionals `f_j²`, `h_j²` and the searches that fix
//! their cut-offs and coupling constants.
//!
//! Every form is a linear combination of ten block moments of `(u, τ)`:
//! `A = ‖Δ_j u‖²`, `B = ‖ΛΔ_j u‖²`, `B2 = ‖Λ²Δ_j u‖²`, `T0..T2` the same
//! for `τ`, `W = ‖Δ_j w‖²`, `Wm = ‖Λ⁻¹Δ_j w‖²`, `X0 = (Δ_j u, Δ_j w)` and
//! `X2 = (ΛΔ_j u, ΛΔ_j w)`, where `w = ℙ div τ`. Along the linear flow
//! `½ d/dt f_j² + h_j² = 0` holds exactly (with `μ = 1`).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{sym_index, sym_weight, Rank, SpectralField};
use crate::grid::DealiasRule;
use crate::lp::FilterBank;
use crate::solver::{Case, ModelParams, State};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Frequency band a functional applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Low,
    Intermediate,
    High,
}

/// Coefficients of a quadratic form over the block moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Form {
    pub a: f64,
    pub b: f64,
    pub b2: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub w: f64,
    pub wm: f64,
    pub x0: f64,
    pub x2: f64,
}

impl Form {
    pub fn eval(&self, m: &Moments) -> f64 {
        self.a * m.a
            + self.b * m.b
            + self.b2 * m.b2
            + self.t0 * m.t0
            + self.t1 * m.t1
            + self.t2 * m.t2
            + self.w * m.w
            + self.wm * m.wm
            + self.x0 * m.x0
            + self.x2 * m.x2
    }
}

/// The ten moments of one annulus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub a: f64,
    pub b: f64,
    pub b2: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub w: f64,
    pub wm: f64,
    pub x0: f64,
    pub x2: f64,
}

/// Moments of every resolvable annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMoments {
    pub j_min: i32,
    pub blocks: Vec<Moments>,
}

impl BlockMoments {
    /// Single pass over the modes accumulating `L^d Σ φ_j² q` for each moment.
    pub fn compute(bank: &FilterBank, u: &SpectralField, tau: &SpectralField) -> Result<Self> {
        if u.grid != bank.grid || tau.grid != bank.grid {
            return Err(Error::GridMismatch);
        }
        if u.rank != Rank::Vector || tau.rank != Rank::SymTensor {
            return Err(Error::RankMismatch("moments expect (vector, symtensor)".into()));
        }
        let grid = bank.grid;
        let ctx = grid.context();
        let d = grid.d;
        let m = tau.comps.len();
        let mut blocks = vec![Moments::default(); bank.count()];
        let mut w = [Complex64::default(); 3];
        for idx in 0..grid.len() {
            let entries = bank.sparse_entries(idx);
            if entries.is_empty() {
                continue;
            }
            let xi = &ctx.xi[idx];
            let r2 = ctx.xi2[idx];
            let uu: f64 = (0..d).map(|i| u.comps[i][idx].norm_sqr()).sum();
            let tt: f64 = (0..m).map(|c| sym_weight(d, c) * tau.comps[c][idx].norm_sqr()).sum();
            for i in 0..d {
                let s: Complex64 = (0..d).map(|j| tau.comps[sym_index(d, i, j)][idx] * xi[j]).sum();
                w[i] = I * s;
            }
            let dot: Complex64 = (0..d).map(|i| xi[i] * w[i]).sum::<Complex64>() / r2;
            for i in 0..d {
                w[i] -= dot * xi[i];
            }
            let ww: f64 = (0..d).map(|i| w[i].norm_sqr()).sum();
            let x: f64 = (0..d).map(|i| (u.comps[i][idx] * w[i].conj()).re).sum();
            let terms = [uu, r2 * uu, r2 * r2 * uu, tt, r2 * tt, r2 * r2 * tt, ww, ww / r2, x, r2 * x];
            for &(jj, v) in entries {
                let v2 = v * v;
                let b = &mut blocks[jj];
                b.a += v2 * terms[0];
                b.b += v2 * terms[1];
                b.b2 += v2 * terms[2];
                b.t0 += v2 * terms[3];
                b.t1 += v2 * terms[4];
                b.t2 += v2 * terms[5];
                b.w += v2 * terms[6];
                b.wm += v2 * terms[7];
                b.x0 += v2 * terms[8];
                b.x2 += v2 * terms[9];
            }
        }
        let vol = grid.volume();
        for b in blocks.iter_mut() {
            for v in [
                &mut b.a, &mut b.b, &mut b.b2, &mut b.t0, &mut b.t1, &mut b.t2, &mut b.w, &mut b.wm, &mut b.x0,
                &mut b.x2,
            ] {
                *v *= vol;
            }
        }
        Ok(Self { j_min: bank.j_min, blocks })
    }

    pub fn at(&self, j: i32) -> &Moments {
        &self.blocks[(j - self.j_min) as usize]
    }

    /// Squared block norms of `u`, `τ` and `Λ⁻¹ℙ div τ`.
    pub fn u_energies(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.a).collect()
    }

    pub fn tau_energies(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.t0).collect()
    }

    pub fn pdiv_energies(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.wm).collect()
    }
}

/// `(f, h)` forms of a case and band with coupling constant `k`.
pub fn forms(case: Case, band: Band, p: &ModelParams, k: f64) -> Option<(Form, Form)> {
    let (n1, n2, al) = (p.nu1, p.nu2, p.alpha);
    let z = Form::default();
    let pair = match (case, band) {
        (Case::I, Band::Low) => (
            Form { a: al, t1: k, x0: 2.0, ..z },
            Form { b: al * n1 + 0.5, t1: al * k, w: -1.0, x2: k + n1, ..z },
        ),
        (Case::I, Band::High) => (Form { a: 1.0, t0: 1.0, ..z }, Form { b: n1, t0: al, ..z }),
        (Case::II, Band::Low) => (
            Form { a: 0.5, wm: 1.0, x0: -2.0 * k, ..z },
            Form { b: 0.5 * (n1 - k), w: k, x2: -n1 * k, ..z },
        ),
        (Case::II, Band::High) => (
            Form { b: 1.0, w: 2.0 + 2.0 * n1 * k, x0: -2.0 * k, ..z },
            Form { b2: n1, b: -0.5 * k, w: k, ..z },
        ),
        (Case::III, Band::Low) => (
            Form { a: al, t1: k, x0: 2.0, ..z },
            Form { t1: al * k, t2: n2 * k, w: -1.0, b: 0.5, x2: k + n2, ..z },
        ),
        (Case::III, Band::Intermediate) => (
            Form { a: 1.0, t0: 1.0, x0: 2.0 * k, ..z },
            Form { t0: al, t1: n2, w: -k, b: 0.5 * k, x0: al * k, x2: n2 * k, ..z },
        ),
        (Case::III, Band::High) => (
            Form { b: n2, t0: k, x0: 2.0, ..z },
            Form { t0: al * k, t1: n2 * k, w: -1.0, b: 0.5, x0: k + al, ..z },
        ),
        (Case::IV, Band::Low) => (
            Form { a: 1.0, t0: 1.0, x0: 2.0 * k, ..z },
            Form { t1: n2, w: -k, b: 0.5 * k, x2: n2 * k, ..z },
        ),
        (Case::IV, Band::High) => (
            Form { b: n2, t0: k, x0: 2.0, ..z },
            Form { t1: n2 * k, w: -1.0, b: 0.5, x0: k, ..z },
        ),
        (Case::V, Band::Low) => (
            Form { a: al, t1: k, x0: 2.0, ..z },
            Form { t1: al * k, w: -1.0, b: 0.5, x2: k, ..z },
        ),
        (Case::V, Band::High) => (
            Form { b: 1.0, t1: 1.0, x0: 2.0 * k, ..z },
            Form { t1: al, w: -k, b: 0.5 * k, x0: al * k, ..z },
        ),
        _ => return None,
    };
    Some(pair)
}

/// Bands used by a case, in increasing frequency.
pub fn case_bands(case: Case) -> &'static [Band] {
    match case {
        Case::III => &[Band::Low, Band::Intermediate, Band::High],
        Case::Custom => &[],
        _ => &[Band::Low, Band::High],
    }
}

/// Reference norm `r^{2p_u}|û|² + r^{2p_s}|ŝ|²` the functional is compared with,
/// where `ŝ` is `τ̂` (or `ŵ` in Case II).
pub fn reference_exponents(case: Case, band: Band) -> (f64, f64) {
    match (case, band) {
        (Case::II, Band::Low) => (0.0, -1.0),
        (Case::II, Band::High) => (1.0, 0.0),
        (Case::I | Case::III | Case::V, Band::Low) => (0.0, 1.0),
        (Case::III | Case::IV, Band::High) => (1.0, 0.0),
        (Case::V, Band::High) => (1.0, 1.0),
        _ => (0.0, 0.0),
    }
}

/// Regularity weight of each band in the Lyapunov functional `Σ_j 2^{jσ} f_j`.
pub fn lyapunov_weight(case: Case, band: Band, d: usize) -> f64 {
    let h = d as f64 / 2.0;
    match (case, band) {
        (_, Band::Low | Band::Intermediate) => h - 1.0,
        (Case::I, Band::High) => h + 1.0,
        (_, Band::High) => h,
    }
}

/// One functional: case, band, coupling constant and cut-offs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyFunctional {
    pub case: Case,
    pub band: Band,
    pub k: f64,
    pub j0: i32,
    /// Case III cut-offs: low band `j ≤ j1`, high band `j > j2`.
    pub j1: Option<i32>,
    pub j2: Option<i32>,
    pub c0: f64,
    pub params: ModelParams,
}

impl EnergyFunctional {
    fn low_cut(&self) -> i32 {
        self.j1.unwrap_or(self.j0)
    }

    fn high_cut(&self) -> i32 {
        self.j2.unwrap_or(self.j0)
    }

    pub fn contains(&self, j: i32) -> bool {
        match self.band {
            Band::Low => j <= self.low_cut(),
            Band::Intermediate => j > self.low_cut() && j <= self.high_cut(),
            Band::High => j > self.high_cut(),
        }
    }

    pub fn forms(&self) -> Result<(Form, Form)> {
        forms(self.case, self.band, &self.params, self.k).ok_or_else(|| {
            Error::InvalidParameter(format!("no {:?} band functional for Case {}", self.band, self.case))
        })
    }

    /// `(f_j², h_j²)` from precomputed moments.
    pub fn squares(&self, m: &Moments) -> Result<(f64, f64)> {
        let (f, h) = self.forms()?;
        Ok((f.eval(m), h.eval(m)))
    }
}

fn check_mu(p: &ModelParams) -> Result<()> {
    if p.mu != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "energy functionals are calibrated for mu = 1, got {}",
            p.mu
        )));
    }
    Ok(())
}

/// `(f_j, h_j)`; refuses a negative quadratic form.
pub fn energy_functionals(ef: &EnergyFunctional, bank: &FilterBank, state: &State, j: i32) -> Result<(f64, f64)> {
    check_mu(&ef.params)?;
    if j < bank.j_min || j > bank.j_max {
        return Err(Error::DyadicRange { j, j_min: bank.j_min, j_max: bank.j_max });
    }
    if ef.params.case != ef.case {
        return Err(Error::InvalidParameter(format!(
            "functional for Case {} applied to Case {} parameters",
            ef.case, ef.params.case
        )));
    }
    if !ef.contains(j) {
        return Err(Error::InvalidParameter(format!("j = {j} lies outside the {:?} band", ef.band)));
    }
    let moments = BlockMoments::compute(bank, &state.u, &state.tau)?;
    let (f2, h2) = ef.squares(moments.at(j))?;
    for v in [f2, h2] {
        if v < 0.0 {
            return Err(Error::NotCoercive { j, value: v });
        }
    }
    Ok((f2.sqrt(), h2.sqrt()))
}

/// Per-mode 2×2 Gram bounds of a form at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Gram {
    uu: f64,
    ss_lo: f64,
    ss_hi: f64,
    off: f64,
}

/// Bound for `|ŵ| ≤ c|ξ||τ̂|_F` used by the Gram matrices.
pub const GRAM_TRACE_BOUND: f64 = 1.0;

/// Largest admissible `|g₁₂| / √(g₁₁g₂₂)`, i.e. smallest normalized eigenvalue 0.1.
pub const MAX_CORRELATION: f64 = 0.9;

fn gram(case: Case, form: &Form, r: f64) -> Gram {
    let r2 = r * r;
    let uu = form.a + form.b * r2 + form.b2 * r2 * r2;
    let cx = form.x0 + form.x2 * r2;
    let cw = form.w + form.wm / r2;
    if case == Case::II {
        return Gram { uu, ss_lo: cw, ss_hi: cw, off: 0.5 * cx.abs() };
    }
    let c = GRAM_TRACE_BOUND;
    let base = form.t0 + form.t1 * r2 + form.t2 * r2 * r2;
    Gram {
        uu,
        ss_lo: base + cw.min(0.0) * c * c * r2,
        ss_hi: base + cw.max(0.0) * c * c * r2,
        off: 0.5 * cx.abs() * c * r,
    }
}

impl Gram {
    fn coercive(&self) -> bool {
        self.uu > 0.0 && self.ss_lo > 0.0 && self.off * self.off <= MAX_CORRELATION.powi(2) * self.uu * self.ss_lo
    }

    fn eig(uu: f64, ss: f64, off: f64) -> (f64, f64) {
        let m = 0.5 * (uu + ss);
        let s = (0.25 * (uu - ss).powi(2) + off * off).sqrt();
        (m - s, m + s)
    }

    /// Extreme eigenvalues relative to the diagonal reference `diag(ρu, ρs)`.
    fn scaled(&self, ru: f64, rs: f64) -> (f64, f64) {
        let off = self.off / (ru * rs).sqrt();
        let lo = Self::eig(self.uu / ru, self.ss_lo / rs, off).0;
        let hi = Self::eig(self.uu / ru, self.ss_hi / rs, off).1;
        (lo, hi)
    }
}

/// Sample radii of annulus `j` clipped to the resolvable band.
fn radii(bank: &FilterBank, j: i32) -> Vec<f64> {
    let grid = bank.grid;
    let r_lo = grid.dk();
    let r_hi = (grid.d as f64).sqrt() * DealiasRule::default().cutoff(grid.n).floor() * grid.dk();
    let a = (0.75 * (j as f64).exp2()).max(r_lo);
    let b = ((8.0 / 3.0) * (j as f64).exp2()).min(r_hi);
    if a > b {
        return Vec::new();
    }
    const SAMPLES: usize = 48;
    let (la, lb) = (a.ln(), b.ln());
    (0..=SAMPLES).map(|i| (la + (lb - la) * i as f64 / SAMPLES as f64).exp()).collect()
}

fn band_coercive(case: Case, f: &Form, h: &Form, bank: &FilterBank, j: i32) -> bool {
    radii(bank, j).iter().all(|&r| gram(case, f, r).coercive() && gram(case, h, r).coercive())
}

/// Equivalence constants of one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandBounds {
    /// `c1·N ≤ f_j² ≤ c2·N` for the band's reference norm `N`.
    pub c1: f64,
    pub c2: f64,
    /// `h_j² ≥ rate·2^{2j}·f_j²` (low band) or `h_j² ≥ rate·f_j²` (other bands).
    pub rate: f64,
}

impl BandBounds {
    pub fn condition(&self) -> f64 {
        self.c2 / self.c1
    }
}

fn band_bounds(case: Case, band: Band, f: &Form, h: &Form, bank: &FilterBank, js: &[i32]) -> Option<BandBounds> {
    let (pu, ps) = reference_exponents(case, band);
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut rate = f64::INFINITY;
    for &j in js {
        for r in radii(bank, j) {
            let (ru, rs) = (r.powf(2.0 * pu), r.powf(2.0 * ps));
            let (flo, fhi) = gram(case, f, r).scaled(ru, rs);
            let (hlo, _) = gram(case, h, r).scaled(ru, rs);
            c1 = c1.min(flo);
            c2 = c2.max(fhi);
            let per_mode = hlo / fhi;
            let scale = if band == Band::Low { (2.0 * j as f64).exp2() } else { 1.0 };
            rate = rate.min(per_mode / scale);
        }
    }
    c1.is_finite().then_some(BandBounds { c1, c2, rate })
}

/// Functional, index range and bounds of one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPlan {
    pub functional: EnergyFunctional,
    pub j_lo: i32,
    pub j_hi: i32,
    pub coercive: bool,
    pub bounds: Option<BandBounds>,
}

impl BandPlan {
    pub fn is_empty(&self) -> bool {
        self.j_lo > self.j_hi
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_lo..=self.j_hi
    }
}

/// Cut-offs, constants and bounds for every band of a case on a filter bank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyPlan {
    pub case: Case,
    pub d: usize,
    pub c0: f64,
    pub j0: i32,
    pub j1: Option<i32>,
    pub j2: Option<i32>,
    pub bands: Vec<BandPlan>,
}

/// Default Case II cut-off between the two bands.
pub const CASE_II_J0: i32 = 0;

fn fixed_k(c0: f64, coef: f64) -> f64 {
    2.0 * c0 * c0 / coef
}

/// Largest `j0` with every `j ∈ [j_min, j0]` coercive.
fn low_cut(case: Case, band: Band, p: &ModelParams, k: f64, bank: &FilterBank) -> Option<i32> {
    let (f, h) = forms(case, band, p, k)?;
    let mut last = None;
    for j in bank.indices() {
        if !band_coercive(case, &f, &h, bank, j) {
            break;
        }
        last = Some(j);
    }
    last
}

/// Smallest `j` with every annulus from `j` to `j_max` coercive.
fn high_start(case: Case, band: Band, p: &ModelParams, k: f64, bank: &FilterBank) -> Option<i32> {
    let (f, h) = forms(case, band, p, k)?;
    let mut first = None;
    for j in bank.indices().rev() {
        if !band_coercive(case, &f, &h, bank, j) {
            break;
        }
        first = Some(j);
    }
    first
}

fn range_coercive(case: Case, band: Band, p: &ModelParams, k: f64, bank: &FilterBank, lo: i32, hi: i32) -> bool {
    match forms(case, band, p, k) {
        Some((f, h)) => (lo..=hi).all(|j| band_coercive(case, &f, &h, bank, j)),
        None => false,
    }
}

/// Half of the largest coupling constant keeping `[lo, hi]` coercive, by
/// bisection on `log K`.
pub fn small_k_search(case: Case, band: Band, p: &ModelParams, bank: &FilterBank, lo: i32, hi: i32) -> Option<f64> {
    const K_MIN: f64 = 1e-8;
    const K_MAX: f64 = 1e3;
    let ok = |k: f64| range_coercive(case, band, p, k, bank, lo, hi);
    if lo > hi {
        return Some(1.0);
    }
    if !ok(K_MIN) {
        return None;
    }
    if ok(K_MAX) {
        return Some(0.5 * K_MAX);
    }
    let (mut a, mut b) = (K_MIN.ln(), K_MAX.ln());
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if ok(m.exp()) {
            a = m;
        } else {
            b = m;
        }
    }
    let mut k = 0.5 * a.exp();
    for _ in 0..20 {
        if ok(k) {
            return Some(k);
        }
        k *= 0.5;
    }
    None
}

impl EnergyPlan {
    /// Deterministic cut-off and constant search for a case.
    pub fn search(params: &ModelParams, bank: &FilterBank) -> Result<Self> {
        check_mu(params)?;
        let case = params.case;
        let d = bank.grid.d;
        let c0 = d as f64;
        let (j_min, j_max) = (bank.j_min, bank.j_max);
        let before = j_min - 1;
        // (band, k, lo, hi) per band
        let mut layout: Vec<(Band, f64, i32, i32)> = Vec::new();
        let j0: i32;
        let (mut j1, mut j2) = (None, None);
        match case {
            Case::I => {
                let k1 = fixed_k(c0, params.alpha);
                j0 = low_cut(case, Band::Low, params, k1, bank).unwrap_or(before);
                layout.push((Band::Low, k1, j_min, j0));
                layout.push((Band::High, 0.0, j0 + 1, j_max));
            }
            Case::V => {
                let k1 = fixed_k(c0, params.alpha);
                j0 = low_cut(case, Band::Low, params, k1, bank).unwrap_or(before);
                let k2 = small_k_search(case, Band::High, params, bank, j0 + 1, j_max).unwrap_or(f64::NAN);
                layout.push((Band::Low, k1, j_min, j0));
                layout.push((Band::High, k2, j0 + 1, j_max));
            }
            Case::IV => {
                let k2 = fixed_k(c0, params.nu2);
                j0 = high_start(case, Band::High, params, k2, bank).unwrap_or(j_max + 1) - 1;
                let k1 = small_k_search(case, Band::Low, params, bank, j_min, j0).unwrap_or(f64::NAN);
                layout.push((Band::Low, k1, j_min, j0));
                layout.push((Band::High, k2, j0 + 1, j_max));
            }
            Case::III => {
                let k1 = fixed_k(c0, params.alpha);
                let k2 = fixed_k(c0, params.nu2);
                let c1 = low_cut(case, Band::Low, params, k1, bank).unwrap_or(before);
                let start = high_start(case, Band::High, params, k2, bank).unwrap_or(j_max + 1);
                let c2 = (start - 1).max(c1);
                let k = small_k_search(case, Band::Intermediate, params, bank, c1 + 1, c2).unwrap_or(f64::NAN);
                j0 = c1;
                j1 = Some(c1);
                j2 = Some(c2);
                layout.push((Band::Low, k1, j_min, c1));
                layout.push((Band::Intermediate, k, c1 + 1, c2));
                layout.push((Band::High, k2, c2 + 1, j_max));
            }
            Case::II => {
                j0 = CASE_II_J0.clamp(before, j_max);
                let kl = small_k_search(case, Band::Low, params, bank, j_min, j0).unwrap_or(f64::NAN);
                let kh = small_k_search(case, Band::High, params, bank, j0 + 1, j_max).unwrap_or(f64::NAN);
                layout.push((Band::Low, kl, j_min, j0));
                layout.push((Band::High, kh, j0 + 1, j_max));
            }
            Case::Custom => {
                return Err(Error::InvalidParameter("custom case has no energy functionals".into()));
            }
        }
        let bands = layout
            .into_iter()
            .map(|(band, k, lo, hi)| {
                let functional = EnergyFunctional { case, band, k, j0, j1, j2, c0, params: *params };
                let js: Vec<i32> = (lo..=hi).collect();
                let coercive = k.is_finite() && range_coercive(case, band, params, k, bank, lo, hi);
                let bounds = forms(case, band, params, k)
                    .filter(|_| k.is_finite())
                    .and_then(|(f, h)| band_bounds(case, band, &f, &h, bank, &js));
                BandPlan { functional, j_lo: lo, j_hi: hi, coercive, bounds }
            })
            .collect();
        Ok(Self { case, d, c0, j0, j1, j2, bands })
    }

    pub fn band(&self, band: Band) -> Option<&BandPlan> {
        self.bands.iter().find(|b| b.functional.band == band)
    }

    pub fn band_of(&self, j: i32) -> Option<&BandPlan> {
        self.bands.iter().find(|b| b.indices().contains(&j))
    }

    /// True when every band's forms are coercive on its whole range.
    pub fn all_coercive(&self) -> bool {
        self.bands.iter().all(|b| b.is_empty() || b.coercive)
    }

    /// `(j, f_j², h_j²)` for every resolvable annulus.
    pub fn profile(&self, moments: &BlockMoments) -> Result<Vec<(i32, f64, f64)>> {
        let mut out = Vec::with_capacity(moments.blocks.len());
        for (jj, m) in moments.blocks.iter().enumerate() {
            let j = moments.j_min + jj as i32;
            let b = self.band_of(j).ok_or(Error::DyadicRange { j, j_min: moments.j_min, j_max: j })?;
            let (f2, h2) = b.functional.squares(m)?;
            out.push((j, f2, h2));
        }
        Ok(out)
    }

    /// `Σ_j 2^{jσ_band} f_j`; a negative `f_j²` signals a coercivity failure.
    pub fn lyapunov(&self, moments: &BlockMoments) -> Result<f64> {
        let mut total = 0.0;
        for (j, f2, _) in self.profile(moments)? {
            if f2 < 0.0 {
                return Err(Error::NotCoercive { j, value: f2 });
            }
            let band = self.band_of(j).map(|b| b.functional.band).unwrap_or(Band::High);
            total += (j as f64 * lyapunov_weight(self.case, band, self.d)).exp2() * f2.sqrt();
        }
        Ok(total)
    }
}
