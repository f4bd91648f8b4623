//! Binary golden-snapshot files for field data.
//!
//! Layout: 8-byte magic `KTSNAP01`, then three little-endian `u32`s
//! (component count, nx, ny), then `ncomp * nx * ny` little-endian `f64`
//! interior values, component-major with the eta index fastest.

use super::grid::{Field, GHOST, NUM_COMPONENTS};
use super::WorkloadError;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"KTSNAP01";

pub fn write_snapshot(field: &Field, path: &Path) -> Result<(), WorkloadError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(NUM_COMPONENTS as u32).to_le_bytes());
    out.extend_from_slice(&(field.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(field.ny() as u32).to_le_bytes());
    for c in 0..NUM_COMPONENTS {
        for i in GHOST..field.nx() + GHOST {
            for j in GHOST..field.ny() + GHOST {
                out.extend_from_slice(&field.comp(c)[field.idx(i, j)].to_le_bytes());
            }
        }
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&out).map_err(io_err)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Field, WorkloadError> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(io_err)?
        .read_to_end(&mut bytes)
        .map_err(io_err)?;
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(WorkloadError::InvalidSpec(format!(
            "{} is not a snapshot file",
            path.display()
        )));
    }
    let word = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (ncomp, nx, ny) = (word(8), word(12), word(16));
    if ncomp != NUM_COMPONENTS {
        return Err(WorkloadError::InvalidSpec(format!(
            "snapshot holds {ncomp} components, expected {NUM_COMPONENTS}"
        )));
    }
    let expected = 20 + ncomp * nx * ny * 8;
    if bytes.len() != expected {
        return Err(WorkloadError::InvalidSpec(format!(
            "snapshot is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut field = Field::zeros(nx, ny);
    let mut offset = 20;
    for c in 0..NUM_COMPONENTS {
        for i in GHOST..nx + GHOST {
            for j in GHOST..ny + GHOST {
                let v = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
                let k = field.idx(i, j);
                field.comp_mut(c)[k] = v;
                offset += 8;
            }
        }
    }
    field.fill_ghosts();
    Ok(field)
}

fn io_err(e: std::io::Error) -> WorkloadError {
    WorkloadError::InvalidSpec(format!("snapshot io error: {e}"))
}
