//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! ```text
//! "NSRC1"            5 bytes magic
//! n                  u32
//! L                  f64
//! components         u32 (always 3)
//! coefficients       for kx, ky, kz ascending in [-n/2, n/2), for each
//!                    component: re f64, im f64
//! ```
//!
//! A JSON sidecar (`<file>.json`) records seed and provenance.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::WaveGrid;
use super::velocity::{SpectralVelocity, VectorSpectrum};
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"NSRC1";
const HEADER_LEN: usize = 5 + 4 + 8 + 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub seed: Option<u64>,
    pub time: f64,
    pub provenance: String,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn encode(field: &VectorSpectrum) -> Vec<u8> {
    let g = *field.grid();
    let n = g.n();
    let mut buf = Vec::with_capacity(HEADER_LEN + g.len() * 48);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    buf.extend_from_slice(&3u32.to_le_bytes());
    let half = (n / 2) as i64;
    for kx in -half..half {
        for ky in -half..half {
            for kz in -half..half {
                let idx = g.flat(g.index_of(kx), g.index_of(ky), g.index_of(kz));
                for c in field.mode(idx) {
                    buf.extend_from_slice(&c.re.to_le_bytes());
                    buf.extend_from_slice(&c.im.to_le_bytes());
                }
            }
        }
    }
    buf
}

pub fn decode(bytes: &[u8]) -> Result<VectorSpectrum> {
    if bytes.len() < HEADER_LEN || &bytes[..5] != MAGIC {
        return Err(Error::Format("missing NSRC1 header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let n = u32_at(5) as usize;
    let length = f64_at(9);
    let ncomp = u32_at(17);
    if ncomp != 3 {
        return Err(Error::Format(format!("expected 3 components, found {ncomp}")));
    }
    let grid = WaveGrid::new(n, length).map_err(|e| Error::Format(e.to_string()))?;
    if bytes.len() != HEADER_LEN + grid.len() * 48 {
        return Err(Error::Format(format!(
            "payload length {} does not match n = {n}",
            bytes.len() - HEADER_LEN
        )));
    }
    let mut field = VectorSpectrum::zeros(grid);
    let half = (n / 2) as i64;
    let mut offset = HEADER_LEN;
    for kx in -half..half {
        for ky in -half..half {
            for kz in -half..half {
                let idx = grid.flat(grid.index_of(kx), grid.index_of(ky), grid.index_of(kz));
                let mut mode = [Complex64::default(); 3];
                for c in mode.iter_mut() {
                    *c = Complex64::new(f64_at(offset), f64_at(offset + 8));
                    offset += 16;
                }
                field.set_mode(idx, mode);
            }
        }
    }
    Ok(field)
}

/// Write `field` and its sidecar. Each file is written to a temporary name
/// and renamed into place.
pub fn write_snapshot(path: &Path, field: &SpectralVelocity, meta: &SnapshotMeta) -> Result<()> {
    write_atomic(path, &encode(field))?;
    let json = serde_json::to_vec_pretty(meta).map_err(|e| Error::Io(e.to_string()))?;
    write_atomic(&sidecar_path(path), &json)
}

/// Read a snapshot and validate it as a divergence-free velocity.
pub fn read_snapshot(path: &Path) -> Result<(SpectralVelocity, Option<SnapshotMeta>)> {
    let raw = decode(&fs::read(path)?)?;
    let field = SpectralVelocity::try_from_spectrum(raw, super::DEFAULT_DIV_TOLERANCE)?;
    let meta = match fs::read(sidecar_path(path)) {
        Ok(bytes) => Some(serde_json::from_slice(&bytes).map_err(|e| Error::Format(e.to_string()))?),
        Err(_) => None,
    };
    Ok((field, meta))
}

/// Write `bytes` to a temporary sibling of `path`, sync, and rename it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_field::random_divfree_field;

    #[test]
    fn header_layout() {
        let g = WaveGrid::periodic_2pi(4).unwrap();
        let bytes = encode(&VectorSpectrum::zeros(g));
        assert_eq!(&bytes[..5], b"NSRC1");
        assert_eq!(u32::from_le_bytes(bytes[5..9].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(bytes[9..17].try_into().unwrap()), g.length());
        assert_eq!(u32::from_le_bytes(bytes[17..21].try_into().unwrap()), 3);
        assert_eq!(bytes.len(), 21 + 64 * 48);
    }

    #[test]
    fn first_record_is_most_negative_mode() {
        let g = WaveGrid::periodic_2pi(4).unwrap();
        let mut f = VectorSpectrum::zeros(g);
        let idx = g.flat(g.index_of(-2), g.index_of(-2), g.index_of(-2));
        f.set_mode(idx, [Complex64::new(1.5, -2.5), Complex64::default(), Complex64::default()]);
        let bytes = encode(&f);
        assert_eq!(f64::from_le_bytes(bytes[21..29].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(bytes[29..37].try_into().unwrap()), -2.5);
    }

    #[test]
    fn file_roundtrip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u0.nsrc");
        let g = WaveGrid::periodic_2pi(8).unwrap();
        let u = random_divfree_field(g, 4, -2.0, 0.3).unwrap();
        let meta = SnapshotMeta {
            seed: Some(4),
            time: 0.0,
            provenance: "random".into(),
        };
        write_snapshot(&path, &u, &meta).unwrap();
        let (back, m) = read_snapshot(&path).unwrap();
        assert_eq!(back, u);
        assert_eq!(m, Some(meta));
    }

    #[test]
    fn corrupt_input_is_rejected() {
        assert!(decode(b"NSRC0aaaaaaaaaaaaaaaaaaaa").is_err());
        let g = WaveGrid::periodic_2pi(4).unwrap();
        let mut bytes = encode(&VectorSpectrum::zeros(g));
        bytes.pop();
        assert!(decode(&bytes).is_err());
    }
}
