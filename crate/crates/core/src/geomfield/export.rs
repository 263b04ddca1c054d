//! Distance-field export: flat little-endian binary and CSV.
//!
//! Binary layout: magic `FFDF`, `u32` dimension, `u64` cell count per axis,
//! `f64` spacing, `f64` origin per axis, then one `f64` per cell in index
//! order (axis 0 fastest).

use std::io::{self, Read, Write};

use crate::geomfield::{DistanceField, Grid};

const MAGIC: &[u8; 4] = b"FFDF";

pub fn write_binary<W: Write>(df: &DistanceField, mut out: W) -> io::Result<()> {
    let grid = df.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in grid.dims() {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    out.write_all(&grid.spacing().to_le_bytes())?;
    for &o in grid.origin() {
        out.write_all(&o.to_le_bytes())?;
    }
    for &v in df.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Header and values of a binary distance-field file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub dims: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn read_binary<R: Read>(mut input: R) -> io::Result<RawField> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a distance-field file"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4) as usize;
    if dim == 0 || dim > crate::MAX_DIM {
        return Err(bad("bad dimension"));
    }
    let mut dims = Vec::with_capacity(dim);
    for _ in 0..dim {
        input.read_exact(&mut b8)?;
        dims.push(u64::from_le_bytes(b8) as usize);
    }
    input.read_exact(&mut b8)?;
    let spacing = f64::from_le_bytes(b8);
    let mut origin = Vec::with_capacity(dim);
    for _ in 0..dim {
        input.read_exact(&mut b8)?;
        origin.push(f64::from_le_bytes(b8));
    }
    let n: usize = dims.iter().product();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        input.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok(RawField {
        dims,
        spacing,
        origin,
        values,
    })
}

/// One row per cell: center coordinates, Ω membership (0/1), distance.
pub fn write_csv<W: Write>(df: &DistanceField, mut out: W) -> io::Result<()> {
    let grid: &Grid = df.grid();
    let axes = ["x", "y", "z"];
    writeln!(out, "{},in_omega,distance", axes[..grid.dim()].join(","))?;
    for idx in 0..grid.len() {
        let c = grid.center(idx);
        for v in &c[..grid.dim()] {
            write!(out, "{v},")?;
        }
        writeln!(out, "{},{}", u8::from(grid.in_omega(idx)), df.value(idx))?;
    }
    Ok(())
}
