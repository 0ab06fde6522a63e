//! Periodic grid geometry, wavenumber tables, dealiasing and cached FFT plans.
//!
//! Coefficients follow the convention `f(x) = Σ_k c_k exp(i ξ_k·x)` with
//! `ξ_k = 2π k / L`, so the forward transform carries the `1/N` factor.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static WORK: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// Periodic box `[0, L)^d` sampled with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub d: usize,
    pub n: usize,
    pub box_length: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, box_length: f64) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::InvalidGrid(format!("dimension {d} not in {{2, 3}}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 16"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {box_length} must be positive")));
        }
        Ok(Self { d, n, box_length })
    }

    /// Default desk-scale grid: 2D, 256 modes, period 64π.
    pub fn desk() -> Self {
        Self {
            d: 2,
            n: 256,
            box_length: 64.0 * PI,
        }
    }

    /// Number of modes (and of physical points).
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Wavenumber quantum `2π / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Box volume `L^d`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.d as i32)
    }

    /// Signed integer wavenumber stored at position `i` along one axis.
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer wavevector of flat mode index `idx` (unused axes are zero).
    pub fn mode_k(&self, idx: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        let mut rest = idx;
        for a in (0..self.d).rev() {
            k[a] = self.signed(rest % self.n);
            rest /= self.n;
        }
        k
    }

    /// Flat index of an integer wavevector (periodically wrapped).
    pub fn mode_index(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        (0..self.d).fold(0usize, |acc, a| acc * self.n + k[a].rem_euclid(n) as usize)
    }

    /// Physical coordinates of flat point index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rest = idx;
        for a in (0..self.d).rev() {
            x[a] = (rest % self.n) as f64 * self.dx();
            rest /= self.n;
        }
        x
    }

    /// Shared precomputed tables and FFT plans for this grid.
    pub fn context(&self) -> Arc<GridContext> {
        static CACHE: OnceLock<Mutex<Vec<Arc<GridContext>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().expect("grid cache poisoned");
        if let Some(ctx) = guard.iter().find(|c| c.grid == *self) {
            return Arc::clone(ctx);
        }
        let ctx = Arc::new(GridContext::build(*self));
        guard.push(Arc::clone(&ctx));
        ctx
    }
}

/// Spectral truncation rule for quadratic products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DealiasRule {
    pub fraction: f64,
}

impl Default for DealiasRule {
    fn default() -> Self {
        Self { fraction: 2.0 / 3.0 }
    }
}

impl DealiasRule {
    /// Largest retained `|k|` per axis.
    pub fn cutoff(&self, n: usize) -> f64 {
        self.fraction * n as f64 / 2.0
    }

    pub fn keeps(&self, n: usize, k: [i64; 3]) -> bool {
        let c = self.cutoff(n);
        k.iter().all(|&ki| (ki.abs() as f64) <= c)
    }
}

/// Per-grid tables: wavevectors, conjugate-mode map, dealias mask, FFT plans.
pub struct GridContext {
    pub grid: Grid,
    pub xi: Vec<[f64; 3]>,
    pub xi2: Vec<f64>,
    pub k2: Vec<i64>,
    pub neg: Vec<usize>,
    pub keep: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridContext").field("grid", &self.grid).finish()
    }
}

impl GridContext {
    fn build(grid: Grid) -> Self {
        let len = grid.len();
        let dk = grid.dk();
        let rule = DealiasRule::default();
        let mut xi = Vec::with_capacity(len);
        let mut xi2 = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        for idx in 0..len {
            let k = grid.mode_k(idx);
            let x = [k[0] as f64 * dk, k[1] as f64 * dk, k[2] as f64 * dk];
            xi.push(x);
            xi2.push(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            k2.push(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            neg.push(grid.mode_index([-k[0], -k[1], -k[2]]));
            keep.push(rule.keeps(grid.n, k));
        }
        let mut planner = FftPlanner::new();
        Self {
            grid,
            xi,
            xi2,
            k2,
            neg,
            keep,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
        }
    }

    /// In-place d-dimensional forward transform, normalized by `1/N`.
    pub fn fft_forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let scale = 1.0 / self.grid.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// In-place d-dimensional inverse transform (unnormalized synthesis).
    pub fn fft_inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        thread_local! {
            static BUFFERS: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
        }
        let n = self.grid.n;
        let d = self.grid.d;
        assert_eq!(data.len(), self.grid.len());
        BUFFERS.with(|cell| {
            let (scratch, buf) = &mut *cell.borrow_mut();
            scratch.resize(plan.get_inplace_scratch_len(), Complex64::default());
            for axis in 0..d {
                let inner = n.pow((d - 1 - axis) as u32);
                if inner == 1 {
                    plan.process_with_scratch(data, scratch);
                    continue;
                }
                buf.resize(n * inner, Complex64::default());
                for block in data.chunks_mut(n * inner) {
                    for (r, row) in buf.chunks_mut(n).enumerate() {
                        for (i, v) in row.iter_mut().enumerate() {
                            *v = block[i * inner + r];
                        }
                    }
                    plan.process_with_scratch(buf, scratch);
                    for (r, row) in buf.chunks(n).enumerate() {
                        for (i, v) in row.iter().enumerate() {
                            block[i * inner + r] = *v;
                        }
                    }
                }
            }
        });
    }

    /// Synthesizes real physical values for each coefficient array, two at a time.
    pub fn to_physical(&self, comps: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.grid.len()]; comps.len()];
        self.to_physical_into(comps, &mut out);
        out
    }

    /// [`Self::to_physical`] into caller-owned arrays.
    pub fn to_physical_into(&self, comps: &[&[Complex64]], out: &mut [Vec<f64>]) {
        assert_eq!(comps.len(), out.len());
        let i = Complex64::new(0.0, 1.0);
        WORK.with(|cell| {
            let work = &mut *cell.borrow_mut();
            work.resize(self.grid.len(), Complex64::default());
            for (pair, dest) in comps.chunks(2).zip(out.chunks_mut(2)) {
                match pair {
                    [a, b] => {
                        for ((w, x), y) in work.iter_mut().zip(a.iter()).zip(b.iter()) {
                            *w = *x + i * *y;
                        }
                    }
                    [a] => work.copy_from_slice(a),
                    _ => unreachable!(),
                }
                self.fft_inverse(work);
                for (o, c) in dest[0].iter_mut().zip(work.iter()) {
                    *o = c.re;
                }
                if let [_, second] = dest {
                    for (o, c) in second.iter_mut().zip(work.iter()) {
                        *o = c.im;
                    }
                }
            }
        });
    }

    /// Analyzes real physical arrays into Hermitian coefficient arrays, two at a time.
    pub fn to_spectral(&self, reals: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::default(); self.grid.len()]; reals.len()];
        self.to_spectral_into(reals, &mut out);
        out
    }

    /// [`Self::to_spectral`] into caller-owned arrays.
    pub fn to_spectral_into(&self, reals: &[&[f64]], out: &mut [Vec<Complex64>]) {
        assert_eq!(reals.len(), out.len());
        WORK.with(|cell| {
            let work = &mut *cell.borrow_mut();
            work.resize(self.grid.len(), Complex64::default());
            for (pair, dest) in reals.chunks(2).zip(out.chunks_mut(2)) {
                match pair {
                    [a, b] => {
                        for ((w, x), y) in work.iter_mut().zip(a.iter()).zip(b.iter()) {
                            *w = Complex64::new(*x, *y);
                        }
                    }
                    [a] => {
                        for (w, x) in work.iter_mut().zip(a.iter()) {
                            *w = Complex64::new(*x, 0.0);
                        }
                    }
                    _ => unreachable!(),
                }
                self.fft_forward(work);
                match dest {
                    [first, second] => {
                        for idx in 0..work.len() {
                            let c = work[idx];
                            let cm = work[self.neg[idx]].conj();
                            first[idx] = 0.5 * (c + cm);
                            second[idx] = Complex64::new(0.0, -0.5) * (c - cm);
                        }
                    }
                    [first] => first.copy_from_slice(work),
                    _ => unreachable!(),
                }
            }
        });
    }

    /// Zeroes every mode outside the default 2/3 band.
    pub fn truncate(&self, coeffs: &mut [Complex64]) {
        for (c, &k) in coeffs.iter_mut().zip(self.keep.iter()) {
            if !k {
                *c = Complex64::default();
            }
        }
    }
}
