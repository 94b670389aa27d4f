//! Binary field snapshots.
//!
//! Layout (little endian): a 32-byte header
//!
//! | bytes  | content                         |
//! |--------|---------------------------------|
//! | 0..8   | magic `IBDLGRID`                |
//! | 8..16  | N as `u64`                      |
//! | 16..24 | box length L as `f64`           |
//! | 24..28 | dtype code as `u32` (1 = `f64`) |
//! | 28..32 | reserved, zero                  |
//!
//! followed by N² values, node `(i, j)` at position `j·N + i`. A text sidecar
//! `<file>.txt` records the origin, the layout and a free-form description.

use std::io::Write;
use std::path::Path;

use ibdl_core::ScalarField;

use crate::HarnessError;

pub const MAGIC: &[u8; 8] = b"IBDLGRID";
pub const DTYPE_F64: u32 = 1;
pub const HEADER_BYTES: usize = 32;

pub fn encode(field: &ScalarField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_BYTES + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    out.extend_from_slice(&g.length().to_le_bytes());
    out.extend_from_slice(&DTYPE_F64.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// `(N, L, values)` from an encoded snapshot.
pub fn decode(bytes: &[u8]) -> Result<(usize, f64, Vec<f64>), HarnessError> {
    let bad = |m: &str| Err(HarnessError::Parse(format!("snapshot: {m}")));
    if bytes.len() < HEADER_BYTES || &bytes[..8] != MAGIC {
        return bad("missing IBDLGRID header");
    }
    let word = |a: usize| -> [u8; 8] { bytes[a..a + 8].try_into().unwrap() };
    let n = u64::from_le_bytes(word(8)) as usize;
    let length = f64::from_le_bytes(word(16));
    let dtype = u32::from_le_bytes(bytes[24..28].try_into().unwrap());
    if dtype != DTYPE_F64 {
        return bad(&format!("unsupported dtype code {dtype}"));
    }
    if bytes.len() != HEADER_BYTES + 8 * n * n {
        return bad(&format!("expected {} payload bytes for N = {n}", 8 * n * n));
    }
    let values = bytes[HEADER_BYTES..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((n, length, values))
}

/// Writes `path` and its `.txt` sidecar.
pub fn write(path: &Path, field: &ScalarField, description: &str) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::File::create(path).and_then(|mut f| f.write_all(&encode(field))).map_err(io)?;
    let g = field.grid();
    let sidecar = format!(
        "description: {description}\nN: {}\nlength: {}\norigin: {} {}\ndtype: f64 little endian\nheader_bytes: {HEADER_BYTES}\nlayout: value of node (i, j) at index j*N + i, node position origin + (i, j)*length/N\n",
        g.n(),
        g.length(),
        g.origin()[0],
        g.origin()[1],
    );
    let side = path.with_extension(format!("{}.txt", path.extension().and_then(|e| e.to_str()).unwrap_or("")));
    std::fs::write(&side, sidecar).map_err(|e| HarnessError::Io(format!("{}: {e}", side.display())))
}
