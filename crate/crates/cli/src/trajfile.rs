//! The NLST trajectory format.
//!
//! All fields little-endian:
//!
//! ```text
//! magic        4 bytes  "NLST"
//! version      u32      1
//! length       f64      torus length L
//! points       u32      n
//! sample_count u32      s
//! times        f64 x s
//! payload      s x n complex pairs (re f64, im f64)
//! ```
//!
//! The payload holds the Fourier coefficients of each snapshot in FFT order,
//! so a round trip is bit-exact.

use std::fs;
use std::path::Path;

use nlslab_core::propagators::Trajectory;
use nlslab_core::spectral_core::{SpectralField, TorusGrid};
use nlslab_core::Complex64;
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"NLST";
pub const VERSION: u32 = 1;
const HEADER: usize = 4 + 4 + 8 + 4 + 4;

#[derive(Debug, Error)]
pub enum TrajectoryFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: not an NLST file (magic {found:?})")]
    BadMagic { path: String, found: Vec<u8> },
    #[error("{path}: unsupported NLST version {found} (this build reads version {VERSION})")]
    UnsupportedVersion { path: String, found: u32 },
    #[error("{path}: truncated or oversized payload: expected {expected} bytes, found {found}")]
    Truncated { path: String, expected: usize, found: usize },
    #[error("{path}: invalid contents: {reason}")]
    Invalid { path: String, reason: String },
}

pub fn encode(traj: &Trajectory) -> Vec<u8> {
    let g = traj.grid();
    let n = g.points();
    let s = traj.len();
    let mut out = Vec::with_capacity(HEADER + 8 * s + 16 * n * s);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&g.length().to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(s as u32).to_le_bytes());
    for t in traj.times() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for snap in traj.snapshots() {
        for c in snap.coefficients() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    out
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("eight bytes"))
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("four bytes"))
}

pub fn decode(bytes: &[u8], path: &str) -> Result<Trajectory, TrajectoryFileError> {
    let p = || path.to_string();
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(TrajectoryFileError::BadMagic { path: p(), found: bytes[..bytes.len().min(4)].to_vec() });
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(TrajectoryFileError::UnsupportedVersion { path: p(), found: version });
    }
    if bytes.len() < HEADER {
        return Err(TrajectoryFileError::Truncated { path: p(), expected: HEADER, found: bytes.len() });
    }
    let length = f64_at(bytes, 8);
    let n = u32_at(bytes, 16) as usize;
    let s = u32_at(bytes, 20) as usize;
    let expected = HEADER + 8 * s + 16 * n * s;
    if bytes.len() != expected {
        return Err(TrajectoryFileError::Truncated { path: p(), expected, found: bytes.len() });
    }
    let invalid = |e: nlslab_core::Error| TrajectoryFileError::Invalid { path: p(), reason: e.to_string() };
    let grid = TorusGrid::new(length, n).map_err(invalid)?;
    let times: Vec<f64> = (0..s).map(|i| f64_at(bytes, HEADER + 8 * i)).collect();
    let base = HEADER + 8 * s;
    let snaps = (0..s)
        .map(|i| {
            let coeffs = (0..n)
                .map(|k| {
                    let at = base + 16 * (i * n + k);
                    Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8))
                })
                .collect();
            SpectralField::from_coefficients(&grid, coeffs)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    Trajectory::new(&grid, times, snaps, None).map_err(invalid)
}

pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<(), TrajectoryFileError> {
    fs::write(path, encode(traj))
        .map_err(|source| TrajectoryFileError::Io { path: path.display().to_string(), source })
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory, TrajectoryFileError> {
    let bytes =
        fs::read(path).map_err(|source| TrajectoryFileError::Io { path: path.display().to_string(), source })?;
    decode(&bytes, &path.display().to_string())
}
