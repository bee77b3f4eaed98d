//! Binary `EUST` snapshot format.
//!
//! Layout (all little-endian): magic `EUST`, version `u32 = 1`, `n: u32`,
//! `box_half_width`, `time`, `nu`, `m` as `f64`, then `n²` values of the
//! kinetic vorticity in row-major order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::radial::VorticityState;
use crate::spectral::{Grid, ScalarField};

pub const MAGIC: &[u8; 4] = b"EUST";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 * 8;

/// A state together with the metadata stored alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: VorticityState,
    pub time: f64,
    pub nu: f64,
}

pub fn encode(state: &VorticityState, time: f64, nu: f64) -> Vec<u8> {
    let grid = state.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for v in [grid.box_half_width(), time, nu, state.m()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in state.omega_kin().values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn read_f64(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if bytes.len() < 8 {
        return Err(Error::Format("truncated header".into()));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated header".into()));
    }
    let n = read_u32(bytes, 8) as usize;
    let (l, time, nu, m) = (
        read_f64(bytes, 12),
        read_f64(bytes, 20),
        read_f64(bytes, 28),
        read_f64(bytes, 36),
    );
    let expected = n
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("grid size {n} overflows")))?;
    if bytes.len() < expected {
        return Err(Error::Format(format!(
            "truncated payload: {} of {} bytes",
            bytes.len(),
            expected
        )));
    }
    if bytes.len() > expected {
        return Err(Error::Format(format!(
            "trailing data: {} bytes beyond payload",
            bytes.len() - expected
        )));
    }
    for (name, v) in [("box_half_width", l), ("time", time), ("nu", nu), ("m", m)] {
        if !v.is_finite() {
            return Err(Error::Format(format!("non-finite {name}")));
        }
    }
    let grid = Grid::new(n, l).map_err(|e| Error::Format(e.to_string()))?;
    let values: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let field = ScalarField::new(grid, values)?;
    // Stored states are trusted to be mean-zero up to the solver's rounding;
    // the strict constructor would reject bit patterns it wrote itself.
    let state = VorticityState::from_parts(m, field);
    Ok(Snapshot { state, time, nu })
}

pub fn write_snapshot(path: &Path, state: &VorticityState, time: f64, nu: f64) -> Result<()> {
    fs::write(path, encode(state, time, nu))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode(&fs::read(path)?)
}
