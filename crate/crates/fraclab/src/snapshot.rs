//! Binary field snapshots.
//!
//! Layout (little-endian): `"FRDF"`, `u32` version, `u32 d`, `u32 n` per axis
//! (`d` times), `f64 L`, `f64 alpha`, `f64 p`, `f64 t`, then the `n^d` values
//! row-major with axis 0 slowest. Frequencies are `(π/L)k`, `k = −n/2..n/2−1`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use fraclab_core::field::{Field, Grid};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

pub const MAGIC: &[u8; 4] = b"FRDF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub alpha: f64,
    pub p: f64,
    pub t: f64,
}

pub fn encode(field: &Field, meta: &SnapshotMeta) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(48 + 8 * field.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&grid.dim().to_le_bytes());
    for _ in 0..grid.dim() {
        out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    }
    for x in [grid.half_length(), meta.alpha, meta.p, meta.t] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize, what: &str) -> Result<&'a [u8], LabError> {
        let end = self.pos.checked_add(k).filter(|e| *e <= self.bytes.len()).ok_or_else(|| {
            LabError::Format(format!("snapshot truncated while reading {what}"))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, LabError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64, LabError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<(Field, SnapshotMeta), LabError> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(LabError::Format("not a snapshot: bad magic".into()));
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(LabError::Format(format!(
            "unsupported snapshot version {version}, this build reads version {VERSION}"
        )));
    }
    let d = c.u32("dimension")?;
    if !(1..=3).contains(&d) {
        return Err(LabError::Format(format!("bad snapshot dimension {d}")));
    }
    let mut ns = Vec::new();
    for _ in 0..d {
        ns.push(c.u32("shape")? as usize);
    }
    if ns.iter().any(|n| *n != ns[0]) {
        return Err(LabError::Format(format!("non-cubic snapshot shape {ns:?}")));
    }
    let l = c.f64("half length")?;
    let meta = SnapshotMeta { alpha: c.f64("alpha")?, p: c.f64("p")?, t: c.f64("t")? };
    let grid = Grid::new(d, ns[0], l).map_err(|e| LabError::Format(format!("bad snapshot grid: {e}")))?;
    let raw = c.take(8 * grid.len(), "values")?;
    if c.pos != bytes.len() {
        return Err(LabError::Format(format!("{} trailing bytes after snapshot values", bytes.len() - c.pos)));
    }
    let values = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    let field = Field::new(grid, values).map_err(|e| LabError::Format(format!("bad snapshot values: {e}")))?;
    Ok((field, meta))
}

pub fn write_snapshot(path: &Path, field: &Field, meta: &SnapshotMeta) -> Result<(), LabError> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(field, meta))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(Field, SnapshotMeta), LabError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}
