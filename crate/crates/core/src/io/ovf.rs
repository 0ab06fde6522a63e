//! OVF1 binary field files.
//!
//! Layout (little endian): magic `OVF1`, `u32` version 1, `u32 d`, `u32 n`,
//! `u32` rank code, `f64` box length, then every component as `n^d`
//! coefficients of `(f64 re, f64 im)` in row-major mode order.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Rank, SpectralField};
use crate::grid::Grid;

pub const MAGIC: [u8; 4] = *b"OVF1";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 4 + 8;

pub fn encode_field(f: &SpectralField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * f.comps.len() * f.grid.len());
    out.extend_from_slice(&MAGIC);
    for v in [VERSION, f.grid.d as u32, f.grid.n as u32, f.rank.code()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&f.grid.box_length.to_le_bytes());
    for c in &f.comps {
        for z in c {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().expect("slice of four bytes"))
}

fn f64_at(b: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(b[off..off + 8].try_into().expect("slice of eight bytes"))
}

pub fn decode_field(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::PayloadLength { expected: HEADER_LEN, actual: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().expect("slice of four bytes");
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::BadVersion(version));
    }
    let d = u32_at(bytes, 8) as usize;
    let n = u32_at(bytes, 12) as usize;
    let code = u32_at(bytes, 16);
    let box_length = f64_at(bytes, 20);
    let rank = Rank::from_code(code).ok_or_else(|| Error::DimensionOverflow(format!("unknown rank code {code}")))?;
    if !(2..=3).contains(&d) {
        return Err(Error::DimensionOverflow(format!("dimension {d}")));
    }
    let len = n
        .checked_pow(d as u32)
        .filter(|&l| l <= 1 << 30)
        .ok_or_else(|| Error::DimensionOverflow(format!("n = {n}, d = {d}")))?;
    let grid = Grid::new(d, n, box_length)?;
    let m = rank.components(d);
    let expected = len
        .checked_mul(16 * m)
        .and_then(|p| p.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::DimensionOverflow(format!("n = {n}, d = {d}")))?;
    if bytes.len() != expected {
        return Err(Error::PayloadLength { expected, actual: bytes.len() });
    }
    let mut comps = Vec::with_capacity(m);
    let mut off = HEADER_LEN;
    for _ in 0..m {
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push(Complex64::new(f64_at(bytes, off), f64_at(bytes, off + 8)));
            off += 16;
        }
        comps.push(c);
    }
    SpectralField::from_comps(grid, rank, comps)
}

pub fn write_field(f: &SpectralField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), encode_field(f)).map_err(|e| Error::io(path, e))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SpectralField> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| Error::io(path, e))?;
    decode_field(&bytes)
}
