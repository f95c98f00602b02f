//! Binary snapshot serialization of the solver state.
//!
//! Layout (all little-endian): 8-byte magic, u32 version, u32 N, u32 M,
//! f64 t, u32 experiment id, u64 config hash, then (re, im) f64 pairs for
//! alpha_{L,m}, L-major with m = 0..L. Negative orders are implied by the
//! reality condition and restored on load.

use crate::basis::ModeIndex;
use crate::error::{Error, Result};
use crate::grid::ModeCoeffs;
use crate::Complex;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"SPHFLOW\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMeta {
    pub n: usize,
    pub m_grid: usize,
    pub t: f64,
    pub experiment_id: u32,
    pub config_hash: u64,
}

fn payload_complex_count(n: usize) -> usize {
    // sum_{L=1..N} (L+1)
    n * (n + 3) / 2
}

pub fn save_snapshot(path: &Path, alpha: &ModeCoeffs, meta: &SnapshotMeta) -> Result<()> {
    let mut buf = Vec::with_capacity(40 + payload_complex_count(meta.n) * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(meta.n as u32).to_le_bytes());
    buf.extend_from_slice(&(meta.m_grid as u32).to_le_bytes());
    buf.extend_from_slice(&meta.t.to_le_bytes());
    buf.extend_from_slice(&meta.experiment_id.to_le_bytes());
    buf.extend_from_slice(&meta.config_hash.to_le_bytes());
    for l in 1..=meta.n {
        for m in 0..=l as i64 {
            let v = alpha.get(ModeIndex::new(l, m));
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<(ModeCoeffs, SnapshotMeta)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 40 {
        return Err(Error::SnapshotFormat("file shorter than header".into()));
    }
    if &bytes[0..8] != MAGIC {
        return Err(Error::SnapshotFormat("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::SnapshotVersion {
            found: version,
            expected: VERSION,
        });
    }
    let n = u32_at(12) as usize;
    let m_grid = u32_at(16) as usize;
    let t = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let experiment_id = u32_at(28);
    let config_hash = u64::from_le_bytes(bytes[32..40].try_into().unwrap());
    let expected_len = 40 + payload_complex_count(n) * 16;
    if bytes.len() != expected_len {
        return Err(Error::SnapshotFormat(format!(
            "payload length {} does not match N = {n} (expected {expected_len})",
            bytes.len()
        )));
    }
    let mut alpha = ModeCoeffs::zeros(n);
    let mut o = 40;
    for l in 1..=n {
        for m in 0..=l as i64 {
            let re = f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[o + 8..o + 16].try_into().unwrap());
            o += 16;
            let v = Complex::new(re, im);
            alpha.set(ModeIndex::new(l, m), v);
            if m > 0 {
                let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                alpha.set(ModeIndex::new(l, -m), v.conj() * sgn);
            }
        }
    }
    Ok((
        alpha,
        SnapshotMeta {
            n,
            m_grid,
            t,
            experiment_id,
            config_hash,
        },
    ))
}
