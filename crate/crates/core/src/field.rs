//! Spectral fields of scalar, vector and symmetric-tensor rank.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Tensorial rank of a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
    SymTensor,
}

impl Rank {
    /// Number of stored components in dimension `d`.
    pub fn components(self, d: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => d,
            Rank::SymTensor => d * (d + 1) / 2,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            Rank::Scalar => 0,
            Rank::Vector => 1,
            Rank::SymTensor => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(Rank::Scalar),
            1 => Some(Rank::Vector),
            2 => Some(Rank::SymTensor),
            _ => None,
        }
    }
}

/// Storage slot of tensor entry `(i, j)`; upper triangle in row-major order.
pub fn sym_index(d: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * d - a * a.saturating_sub(1) / 2 + (b - a)
}

/// Multiplicity of storage slot `c` in the Frobenius inner product (2 off-diagonal).
pub fn sym_weight(d: usize, c: usize) -> f64 {
    let (i, j) = sym_pair(d, c);
    if i == j {
        1.0
    } else {
        2.0
    }
}

/// Tensor entry `(i, j)` of storage slot `c`.
pub fn sym_pair(d: usize, c: usize) -> (usize, usize) {
    let mut slot = 0;
    for i in 0..d {
        for j in i..d {
            if slot == c {
                return (i, j);
            }
            slot += 1;
        }
    }
    panic!("symmetric slot {c} out of range for d={d}");
}

/// Complex Fourier coefficients of a real field on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub rank: Rank,
    pub comps: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, rank: Rank) -> Self {
        let comps = (0..rank.components(grid.d))
            .map(|_| vec![Complex64::default(); grid.len()])
            .collect();
        Self { grid, rank, comps }
    }

    pub fn from_comps(grid: Grid, rank: Rank, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != rank.components(grid.d) || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::RankMismatch(format!(
                "expected {} components of length {}",
                rank.components(grid.d),
                grid.len()
            )));
        }
        Ok(Self { grid, rank, comps })
    }

    /// Builds a field from real physical-space samples.
    pub fn from_physical(grid: Grid, rank: Rank, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != rank.components(grid.d) {
            return Err(Error::RankMismatch(format!(
                "expected {} physical components, got {}",
                rank.components(grid.d),
                values.len()
            )));
        }
        let refs: Vec<&[f64]> = values.iter().map(|v| v.as_slice()).collect();
        let comps = grid.context().to_spectral(&refs);
        Ok(Self { grid, rank, comps })
    }

    /// Builds a field by sampling `f(x) -> components` on the grid points.
    pub fn from_fn(grid: Grid, rank: Rank, f: impl Fn([f64; 3]) -> Vec<f64>) -> Self {
        let m = rank.components(grid.d);
        let mut values = vec![vec![0.0; grid.len()]; m];
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for c in 0..m {
                values[c][idx] = v[c];
            }
        }
        Self::from_physical(grid, rank, &values).expect("component count matches rank")
    }

    /// Real physical-space samples of every component.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        let refs: Vec<&[Complex64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        self.grid.context().to_physical(&refs)
    }

    /// Largest imaginary part of the synthesized physical field.
    pub fn max_imag_physical(&self) -> f64 {
        let ctx = self.grid.context();
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            let mut work = c.clone();
            ctx.fft_inverse(&mut work);
            worst = work.iter().fold(worst, |m, z| m.max(z.im.abs()));
        }
        worst
    }

    /// Largest deviation from Hermitian symmetry over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        let ctx = self.grid.context();
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for (idx, z) in c.iter().enumerate() {
                worst = worst.max((*z - c[ctx.neg[idx]].conj()).norm());
            }
        }
        worst
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.comps {
            for z in c.iter_mut() {
                *z *= a;
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_same(other)?;
        for (x, y) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (p, q) in x.iter_mut().zip(y.iter()) {
                *p += a * *q;
            }
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch(format!("{:?} vs {:?}", self.rank, other.rank)));
        }
        Ok(())
    }

    /// Zeroes modes outside the 2/3 band.
    pub fn truncate(&mut self) {
        let ctx = self.grid.context();
        for c in &mut self.comps {
            ctx.truncate(c);
        }
    }

    /// Squared L² norm over the box, Frobenius for tensors.
    pub fn norm_sq(&self) -> f64 {
        let d = self.grid.d;
        let mut total = 0.0;
        for (ci, c) in self.comps.iter().enumerate() {
            let w = if self.rank == Rank::SymTensor { sym_weight(d, ci) } else { 1.0 };
            total += w * c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        total * self.grid.volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Embeds the coefficients into a finer (or equal) grid with the same period.
    pub fn embed(&self, fine: Grid) -> Result<Self> {
        if fine.d != self.grid.d || fine.box_length != self.grid.box_length || fine.n < self.grid.n {
            return Err(Error::GridMismatch);
        }
        let mut out = SpectralField::zeros(fine, self.rank);
        let half = (self.grid.n / 2) as i64;
        for idx in 0..self.grid.len() {
            let k = self.grid.mode_k(idx);
            if k.iter().any(|&ki| ki == -half) {
                continue;
            }
            let target = fine.mode_index(k);
            for (o, s) in out.comps.iter_mut().zip(self.comps.iter()) {
                o[target] = s[idx];
            }
        }
        Ok(out)
    }

    /// Single component as a scalar field.
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            rank: Rank::Scalar,
            comps: vec![self.comps[c].clone()],
        }
    }
}

/// Dealiased product of two scalar fields.
pub fn product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    if f.rank != Rank::Scalar {
        return Err(Error::RankMismatch("product expects scalar fields".into()));
    }
    let ctx = f.grid.context();
    let phys = ctx.to_physical(&[&f.comps[0], &g.comps[0]]);
    let prod: Vec<f64> = phys[0].iter().zip(phys[1].iter()).map(|(a, b)| a * b).collect();
    let mut out = ctx.to_spectral(&[&prod]);
    ctx.truncate(&mut out[0]);
    Ok(SpectralField {
        grid: f.grid,
        rank: Rank::Scalar,
        comps: out,
    })
}
