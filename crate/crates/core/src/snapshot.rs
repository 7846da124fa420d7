//! `VFV1` binary snapshots and 16-bit PGM density quicklooks.
//!
//! A snapshot is one ASCII header line `VFV1 n=<n> t=<time> gamma=<gamma>`
//! terminated by `\n`, followed by `4 n^2` little-endian `f64` values: the
//! row-major density plane, then `m_x`, `m_y` and `E` planes.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::eos::Conserved;
use crate::error::{Error, Result};
use crate::grid::{Boundary, ConservativeField, Mesh};

pub const MAGIC: &str = "VFV1";

pub fn encode_snapshot(field: &ConservativeField, gamma: f64) -> Vec<u8> {
    let header = format!("{MAGIC} n={} t={:?} gamma={:?}\n", field.mesh.n, field.time, gamma);
    let mut out = Vec::with_capacity(header.len() + 32 * field.cells.len());
    out.extend_from_slice(header.as_bytes());
    for q in 0..4 {
        for c in &field.cells {
            out.extend_from_slice(&c.to_array()[q].to_le_bytes());
        }
    }
    out
}

pub fn write_snapshot(path: &Path, field: &ConservativeField, gamma: f64) -> Result<()> {
    fs::write(path, encode_snapshot(field, gamma))?;
    Ok(())
}

/// Parses a snapshot. The boundary mode is not part of the format and is supplied by the caller.
pub fn decode_snapshot(path: &Path, bytes: &[u8], bc: Boundary) -> Result<(ConservativeField, f64)> {
    let bad = |offset: usize, reason: &str| Error::Snapshot {
        path: path.to_path_buf(),
        offset,
        reason: reason.to_string(),
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad(0, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|e| bad(e.valid_up_to(), "header is not UTF-8"))?;
    let mut parts = header.split(' ');
    if parts.next() != Some(MAGIC) {
        return Err(bad(0, "bad magic"));
    }
    let mut field_value = |key: &str| -> Result<&str> {
        let part = parts.next().ok_or_else(|| bad(nl, &format!("missing {key}")))?;
        let offset = part.as_ptr() as usize - header.as_ptr() as usize;
        part.strip_prefix(key)
            .and_then(|s| s.strip_prefix('='))
            .ok_or_else(|| bad(offset, &format!("expected {key}=")))
    };
    let n: usize = field_value("n")?.parse().map_err(|_| bad(5, "bad n"))?;
    let t: f64 = field_value("t")?.parse().map_err(|_| bad(5, "bad t"))?;
    let gamma: f64 = field_value("gamma")?.parse().map_err(|_| bad(5, "bad gamma"))?;
    let mesh = Mesh::new(n, bc).map_err(|_| bad(5, "n is not a power of two"))?;
    let cells_n = n * n;
    let body = &bytes[nl + 1..];
    if body.len() != 32 * cells_n {
        return Err(bad(nl + 1 + body.len().min(32 * cells_n), "payload length mismatch"));
    }
    let plane = |q: usize, k: usize| {
        let off = 8 * (q * cells_n + k);
        f64::from_le_bytes(body[off..off + 8].try_into().expect("8-byte slice"))
    };
    let cells = (0..cells_n)
        .map(|k| Conserved::new(plane(0, k), [plane(1, k), plane(2, k)], plane(3, k)))
        .collect();
    Ok((ConservativeField::new(mesh, t, cells)?, gamma))
}

pub fn read_snapshot(path: &Path, bc: Boundary) -> Result<(ConservativeField, f64)> {
    let bytes = fs::read(path)?;
    decode_snapshot(path, &bytes, bc)
}

/// Binary 16-bit PGM of the density, `y` pointing up.
pub fn write_density_pgm(path: &Path, field: &ConservativeField) -> Result<()> {
    let n = field.mesh.n;
    let (lo, hi) = field
        .cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.rho), hi.max(c.rho))
        });
    let span = hi - lo;
    let mut w = BufWriter::new(fs::File::create(path)?);
    write!(w, "P5\n{n} {n}\n65535\n")?;
    for j in (0..n).rev() {
        for i in 0..n {
            let v = if span > 0.0 {
                ((field.at(i, j).rho - lo) / span * 65535.0).round() as u16
            } else {
                0
            };
            w.write_all(&v.to_be_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}
