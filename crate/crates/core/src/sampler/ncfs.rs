//! `NCFS` field container.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic   b"NCFS"
//! version u32                      (currently 1)
//! model   u8 tag, u32 dim, f64 alpha, u32 degree
//! grid    u8 tag, f64 side, f64 spacing, u32 dim, u32 n_theta, u32 n_phi
//! seed    u64
//! index   u64
//! count   u64
//! values  count x f64
//! ```
//!
//! Unused descriptor fields are written as zero. A JSON sidecar next to the
//! file repeats the provenance in readable form.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{GridSpec, SpectralModel};
use super::sample::FieldSample;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NCFS";
pub const VERSION: u32 = 1;

const MODEL_RPW: u8 = 0;
const MODEL_TORUS: u8 = 1;
const MODEL_SPHERE: u8 = 2;
const GRID_PLANAR: u8 = 0;
const GRID_TORUS: u8 = 1;
const GRID_SPHERE: u8 = 2;

/// Readable provenance written beside a binary container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub model: SpectralModel,
    pub grid: GridSpec,
    pub seed: u64,
    pub index: u64,
    pub node_count: usize,
}

pub fn encode(sample: &FieldSample) -> Vec<u8> {
    let mut out = Vec::with_capacity(80 + 8 * sample.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let (tag, dim, alpha, degree) = match sample.model {
        SpectralModel::PlaneWave2D => (MODEL_RPW, 2u32, 0.0, 0u32),
        SpectralModel::BandLimitedTorus { dim, alpha } => (MODEL_TORUS, dim as u32, alpha, 0),
        SpectralModel::SphericalHarmonic { degree } => (MODEL_SPHERE, 0, 0.0, degree as u32),
    };
    out.push(tag);
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&alpha.to_le_bytes());
    out.extend_from_slice(&degree.to_le_bytes());
    let (tag, side, spacing, dim, n_theta, n_phi) = match sample.grid {
        GridSpec::PlanarWindow { side, spacing } => (GRID_PLANAR, side, spacing, 2u32, 0u32, 0u32),
        GridSpec::Torus { side, spacing, dim } => (GRID_TORUS, side, spacing, dim as u32, 0, 0),
        GridSpec::LatLongSphere { n_theta, n_phi } => (GRID_SPHERE, 0.0, 0.0, 2, n_theta as u32, n_phi as u32),
    };
    out.push(tag);
    out.extend_from_slice(&side.to_le_bytes());
    out.extend_from_slice(&spacing.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&n_theta.to_le_bytes());
    out.extend_from_slice(&n_phi.to_le_bytes());
    out.extend_from_slice(&sample.seed.to_le_bytes());
    out.extend_from_slice(&sample.index.to_le_bytes());
    out.extend_from_slice(&(sample.values.len() as u64).to_le_bytes());
    for v in &sample.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], String> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        self.pos = end;
        Ok(slice.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> std::result::Result<u8, String> {
        Ok(self.take::<1>()?[0])
    }
    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode(bytes: &[u8]) -> std::result::Result<FieldSample, String> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err("bad magic, not an NCFS container".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let (tag, dim, alpha, degree) = (r.u8()?, r.u32()?, r.f64()?, r.u32()?);
    let model = match tag {
        MODEL_RPW => SpectralModel::PlaneWave2D,
        MODEL_TORUS => SpectralModel::BandLimitedTorus { dim: dim as usize, alpha },
        MODEL_SPHERE => SpectralModel::SphericalHarmonic { degree: degree as usize },
        other => return Err(format!("unknown model tag {other}")),
    };
    let (tag, side, spacing, dim, n_theta, n_phi) = (r.u8()?, r.f64()?, r.f64()?, r.u32()?, r.u32()?, r.u32()?);
    let grid = match tag {
        GRID_PLANAR => GridSpec::PlanarWindow { side, spacing },
        GRID_TORUS => GridSpec::Torus { side, spacing, dim: dim as usize },
        GRID_SPHERE => GridSpec::LatLongSphere { n_theta: n_theta as usize, n_phi: n_phi as usize },
        other => return Err(format!("unknown grid tag {other}")),
    };
    let seed = r.u64()?;
    let index = r.u64()?;
    let count = r.u64()? as usize;
    if bytes.len() - r.pos != count.saturating_mul(8) {
        return Err(format!("expected {count} values, found {} trailing bytes", bytes.len() - r.pos));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(r.f64()?);
    }
    model.validate().map_err(|e| e.to_string())?;
    let sample = FieldSample::synthetic(model, grid, values).map_err(|e| e.to_string())?;
    Ok(sample.with_provenance(seed, index))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Write the container and its sidecar; returns the sidecar path.
pub fn write_ncfs(path: &Path, sample: &FieldSample) -> Result<PathBuf> {
    fs::write(path, encode(sample))?;
    let sidecar = Sidecar {
        format: "NCFS".into(),
        version: VERSION,
        model: sample.model,
        grid: sample.grid,
        seed: sample.seed,
        index: sample.index,
        node_count: sample.values.len(),
    };
    let side_path = sidecar_path(path);
    fs::write(&side_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(side_path)
}

pub fn read_ncfs(path: &Path) -> Result<FieldSample> {
    let bytes = fs::read(path)?;
    decode(&bytes).map_err(|reason| Error::Format { path: path.to_path_buf(), reason })
}
