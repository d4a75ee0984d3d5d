use std::io::{self, Read, Write};

use super::grid::Grid;
use crate::Real;

pub const DUMP_MAGIC: &[u8; 4] = b"TBF1";

/// Writes node-centred fields: magic, node dims (3×u64), spacing (3×f64),
/// field count (u64), then each field as little-endian f64, x-fastest.
pub fn write_field_dump<T: Real, W: Write>(mut w: W, grid: &Grid<T>, fields: &[&[T]]) -> io::Result<()> {
    let n = grid.n_nodes();
    if fields.iter().any(|f| f.len() != n) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "field length does not match node count"));
    }
    w.write_all(DUMP_MAGIC)?;
    for d in grid.node_dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for h in grid.spacing {
        w.write_all(&h.as_f64().to_le_bytes())?;
    }
    w.write_all(&(fields.len() as u64).to_le_bytes())?;
    for f in fields {
        for &x in f.iter() {
            w.write_all(&x.as_f64().to_le_bytes())?;
        }
    }
    w.flush()
}

/// Parsed field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub node_dims: [usize; 3],
    pub spacing: [f64; 3],
    pub fields: Vec<Vec<f64>>,
}

pub fn read_field_dump<R: Read>(mut r: R) -> io::Result<FieldDump> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad field dump magic"));
    }
    let mut u = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> io::Result<u64> {
        r.read_exact(&mut u)?;
        Ok(u64::from_le_bytes(u))
    };
    let node_dims = [next_u64(&mut r)? as usize, next_u64(&mut r)? as usize, next_u64(&mut r)? as usize];
    let mut spacing = [0.0; 3];
    for h in &mut spacing {
        *h = f64::from_bits(next_u64(&mut r)?);
    }
    let count = next_u64(&mut r)? as usize;
    let n: usize = node_dims.iter().product();
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut f = Vec::with_capacity(n);
        for _ in 0..n {
            f.push(f64::from_bits(next_u64(&mut r)?));
        }
        fields.push(f);
    }
    Ok(FieldDump { node_dims, spacing, fields })
}
