//! Field snapshot file format: a small binary header (grid spec, basis hash,
//! seed) followed by per-site fiber coordinates as 64-bit floats,
//! little-endian, sites in row-major active-dimension order.
//!
//! Layout (all integers little-endian):
//! ```text
//! magic   8 bytes  "S7FLD001"
//! u32     number of active dimensions k (1..=3)
//! k times: u32 dim index, u32 size, f64 length
//! u64     generator seed (0 when not applicable)
//! u64     basis hash (FNV-1a of the Omega^2_7 basis bit patterns)
//! sites * 7 f64    fiber coordinates
//! ```

use super::{FiberChart, FiberField, LatticeGrid};
use crate::error::CoreError;
use crate::Fiber7;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"S7FLD001";

/// Header metadata carried by a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub grid: LatticeGrid,
    pub seed: u64,
    pub basis_hash: u64,
}

pub fn write_snapshot(path: &Path, field: &FiberField, seed: u64) -> Result<(), CoreError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n_active() as u32).to_le_bytes())?;
    for axis in 0..grid.n_active() {
        w.write_all(&(grid.active_dims()[axis] as u32).to_le_bytes())?;
        w.write_all(&(grid.sizes()[axis] as u32).to_le_bytes())?;
        w.write_all(&grid.lengths()[axis].to_le_bytes())?;
    }
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&FiberChart::standard().basis_hash().to_le_bytes())?;
    for a in field.values() {
        for v in a {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(FiberField, SnapshotHeader), CoreError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::SnapshotFormat("bad magic".into()));
    }
    let k = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&k) {
        return Err(CoreError::SnapshotFormat(format!("bad active-dim count {k}")));
    }
    let mut dims = Vec::new();
    let mut sizes = Vec::new();
    let mut lengths = Vec::new();
    for _ in 0..k {
        dims.push(read_u32(&mut r)? as usize);
        sizes.push(read_u32(&mut r)? as usize);
        lengths.push(read_f64(&mut r)?);
    }
    let seed = read_u64(&mut r)?;
    let basis_hash = read_u64(&mut r)?;
    let expected = FiberChart::standard().basis_hash();
    if basis_hash != expected {
        return Err(CoreError::SnapshotFormat(format!(
            "basis hash mismatch: file {basis_hash:#18x}, runtime {expected:#18x}"
        )));
    }
    let grid = LatticeGrid::new(dims, sizes, lengths)
        .map_err(|e| CoreError::SnapshotFormat(e.to_string()))?;
    let mut values: Vec<Fiber7> = Vec::with_capacity(grid.num_sites());
    for _ in 0..grid.num_sites() {
        let mut a = [0.0f64; 7];
        for v in a.iter_mut() {
            *v = read_f64(&mut r)?;
        }
        values.push(a);
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(CoreError::SnapshotFormat("trailing bytes after site data".into()));
    }
    let header = SnapshotHeader { grid: grid.clone(), seed, basis_hash };
    Ok((FiberField::new(grid, values), header))
}

fn read_u32(r: &mut impl Read) -> Result<u32, CoreError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, CoreError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, CoreError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
