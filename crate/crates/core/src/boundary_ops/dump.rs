//! Binary operator dump: little-endian header (8-byte ASCII label padded
//! with spaces, u32 dimension n, u32 panel count, u64 rows, u64 cols)
//! followed by the row-major 64-bit float entries.

use std::io::{Read, Write};
use std::path::Path;

use super::OperatorMatrix;
use crate::error::{Error, Result};

impl OperatorMatrix {
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut label = [b' '; 8];
        for (dst, src) in label.iter_mut().zip(self.label.tag().bytes()) {
            *dst = src;
        }
        f.write_all(&label)?;
        f.write_all(&(self.mesh.n as u32).to_le_bytes())?;
        f.write_all(&(self.mesh.panel_count() as u32).to_le_bytes())?;
        f.write_all(&(self.matrix.nrows() as u64).to_le_bytes())?;
        f.write_all(&(self.matrix.ncols() as u64).to_le_bytes())?;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                f.write_all(&self.matrix[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Header and entries of a dumped operator.
pub struct OperatorDump {
    pub label: String,
    pub n: u32,
    pub panels: u32,
    pub rows: u64,
    pub cols: u64,
    pub entries: Vec<f64>,
}

pub fn read_dump(path: &Path) -> Result<OperatorDump> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut label = [0u8; 8];
    f.read_exact(&mut label)?;
    let mut u32buf = [0u8; 4];
    f.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf);
    f.read_exact(&mut u32buf)?;
    let panels = u32::from_le_bytes(u32buf);
    let mut u64buf = [0u8; 8];
    f.read_exact(&mut u64buf)?;
    let rows = u64::from_le_bytes(u64buf);
    f.read_exact(&mut u64buf)?;
    let cols = u64::from_le_bytes(u64buf);
    let count = (rows * cols) as usize;
    let mut entries = vec![0.0f64; count];
    for e in entries.iter_mut() {
        f.read_exact(&mut u64buf)?;
        *e = f64::from_le_bytes(u64buf);
    }
    let label = std::str::from_utf8(&label)
        .map_err(|_| Error::Numerical("dump label is not ASCII".into()))?
        .trim_end()
        .to_string();
    Ok(OperatorDump { label, n, panels, rows, cols, entries })
}
