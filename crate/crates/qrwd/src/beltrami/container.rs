//! Binary container for fields and grid maps.
//!
//! Layout, little endian: magic `QRWD`, version `u32`, kind `u8`
//! (1 field, 2 map), box centre and half sides as four `f64`, `nx` and `ny`
//! as `u64`, then row-major `(re, im)` pairs. Maps append the two anchors,
//! the density and the residual history.

use super::{BeltramiField, Grid, GridMap};
use crate::error::{QrwdError, Result};
use crate::numerics::{c, Rectangle, C64};

pub const MAGIC: &[u8; 4] = b"QRWD";
pub const VERSION: u32 = 1;
const KIND_FIELD: u8 = 1;
const KIND_MAP: u8 = 2;

fn put_header(out: &mut Vec<u8>, kind: u8, g: &Grid) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind);
    for v in [g.bbox.center.re, g.bbox.center.im, g.bbox.half_width, g.bbox.half_height] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(g.nx as u64).to_le_bytes());
    out.extend_from_slice(&(g.ny as u64).to_le_bytes());
}

fn put_complex(out: &mut Vec<u8>, values: &[C64]) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| QrwdError::Invalid("container truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn complex(&mut self) -> Result<C64> {
        Ok(c(self.f64()?, self.f64()?))
    }
    fn complexes(&mut self, n: usize) -> Result<Vec<C64>> {
        (0..n).map(|_| self.complex()).collect()
    }
    fn header(&mut self, kind: u8) -> Result<Grid> {
        if self.take(4)? != MAGIC {
            return Err(QrwdError::Invalid("bad magic".into()));
        }
        let version = u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(QrwdError::Invalid(format!("unsupported container version {version}")));
        }
        let k = self.take(1)?[0];
        if k != kind {
            return Err(QrwdError::Invalid(format!("container holds kind {k}, expected {kind}")));
        }
        let (cx, cy, hw, hh) = (self.f64()?, self.f64()?, self.f64()?, self.f64()?);
        let (nx, ny) = (self.u64()? as usize, self.u64()? as usize);
        let cells = nx.checked_mul(ny).ok_or_else(|| QrwdError::Invalid("grid size overflows".into()))?;
        if cells.saturating_mul(16) > self.buf.len() {
            return Err(QrwdError::Invalid("container truncated".into()));
        }
        Grid::new(Rectangle::new(c(cx, cy), hw, hh)?, nx, ny)
    }
    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(QrwdError::Invalid("trailing bytes in container".into()));
        }
        Ok(())
    }
}

pub fn field_to_bytes(f: &BeltramiField) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 16 * f.samples.len());
    put_header(&mut out, KIND_FIELD, &f.grid);
    put_complex(&mut out, &f.samples);
    out
}

pub fn field_from_bytes(buf: &[u8]) -> Result<BeltramiField> {
    let mut r = Reader { buf, pos: 0 };
    let grid = r.header(KIND_FIELD)?;
    let samples = r.complexes(grid.len())?;
    r.finish()?;
    BeltramiField::from_samples(grid, samples)
}

pub fn map_to_bytes(m: &GridMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(96 + 32 * m.values.len());
    put_header(&mut out, KIND_MAP, &m.grid);
    put_complex(&mut out, &m.values);
    put_complex(&mut out, &[m.anchors.0, m.anchors.1]);
    put_complex(&mut out, &m.h);
    out.extend_from_slice(&(m.residuals.len() as u64).to_le_bytes());
    for r in &m.residuals {
        out.extend_from_slice(&r.to_le_bytes());
    }
    out
}

pub fn map_from_bytes(buf: &[u8]) -> Result<GridMap> {
    let mut r = Reader { buf, pos: 0 };
    let grid = r.header(KIND_MAP)?;
    let values = r.complexes(grid.len())?;
    let anchors = (r.complex()?, r.complex()?);
    let h = r.complexes(grid.len())?;
    let n = r.u64()? as usize;
    let residuals = (0..n).map(|_| r.f64()).collect::<Result<Vec<f64>>>()?;
    r.finish()?;
    Ok(GridMap::from_parts(grid, values, anchors, h, residuals))
}
