use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodal::AreaEstimator;
use crate::sampler::{validate_pair, GridSpec, SpectralModel};
use crate::specfn::bessel_zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    FaberKrahn,
    Sandwich,
    Helmholtz,
    Covariance,
    Perturbation,
}

impl Check {
    pub const ALL: [Check; 5] =
        [Check::FaberKrahn, Check::Sandwich, Check::Helmholtz, Check::Covariance, Check::Perturbation];
}

/// Inner and outer radius of one sandwich check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichPair {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub model: SpectralModel,
    pub grid: GridSpec,
    pub realizations: usize,
    pub master_seed: u64,
    /// Ball radii for the domain-density estimate.
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Thresholds at which the volume distribution is tabulated; the sandwich
    /// check runs at each of them and at `t = inf`.
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub checks: BTreeSet<Check>,
    /// Where manifest, tables and report go. Not part of the config hash.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Area used for the volume distribution, joint table and sandwich.
    #[serde(default)]
    pub area_estimator: AreaEstimator,
    /// Area used by the Faber-Krahn check, whose margin is set for cell counts.
    #[serde(default)]
    pub fk_estimator: AreaEstimator,
    /// Radius of the centred ball whose domains enter the volume distribution;
    /// `None` takes every interior domain.
    #[serde(default)]
    pub psi_radius: Option<f64>,
    #[serde(default)]
    pub sandwich: Vec<SandwichPair>,
    #[serde(default = "default_margin")]
    pub fk_margin: f64,
    #[serde(default = "default_lags")]
    pub covariance_lags: Vec<f64>,
    #[serde(default = "default_perturbation")]
    pub perturbation_b: Vec<f64>,
    /// Also write each field as NCFS. Not part of the config hash.
    #[serde(default)]
    pub keep_fields: bool,
}

fn default_margin() -> f64 {
    0.1
}

fn default_lags() -> Vec<f64> {
    let j01 = bessel_zero(crate::specfn::BesselOrder::integer(0), 1).expect("first zero of J_0");
    vec![1.0, j01, 5.0]
}

fn default_perturbation() -> Vec<f64> {
    vec![1e-3, 5e-4]
}

impl EnsembleConfig {
    /// A config with every optional field at its default.
    pub fn new(model: SpectralModel, grid: GridSpec, realizations: usize, master_seed: u64) -> Self {
        Self {
            model,
            grid,
            realizations,
            master_seed,
            radii: Vec::new(),
            thresholds: Vec::new(),
            checks: BTreeSet::new(),
            output_dir: None,
            area_estimator: AreaEstimator::default(),
            fk_estimator: AreaEstimator::default(),
            psi_radius: None,
            sandwich: Vec::new(),
            fk_margin: default_margin(),
            covariance_lags: default_lags(),
            perturbation_b: default_perturbation(),
            keep_fields: false,
        }
    }

    pub fn has(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }

    /// Half the side of a flat 2-D grid: the largest ball radius it holds.
    fn ball_limit(&self) -> Option<f64> {
        match self.grid {
            GridSpec::PlanarWindow { side, .. } | GridSpec::Torus { side, dim: 2, .. } => Some(0.5 * side),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_pair(&self.model, &self.grid).map_err(|e| Error::Config(e.to_string()))?;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        let limit = self.ball_limit();
        let fits = |r: f64| r.is_finite() && r > 0.0 && limit.is_some_and(|l| r <= l + 1e-9);
        if let Some(&r) = self.radii.iter().find(|&&r| !fits(r)) {
            return bad(format!("radius {r} does not fit the grid (limit {limit:?})"));
        }
        if let Some(r) = self.psi_radius.filter(|&r| !fits(r)) {
            return bad(format!("psi radius {r} does not fit the grid (limit {limit:?})"));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) || self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("thresholds {:?} must be finite and strictly increasing", self.thresholds));
        }
        if !(0.0..1.0).contains(&self.fk_margin) {
            return bad(format!("margin {} must lie in [0, 1)", self.fk_margin));
        }
        let planar = matches!(self.grid, GridSpec::PlanarWindow { .. });
        if self.has(Check::Sandwich) {
            if !planar {
                return bad("the sandwich check needs a planar window".into());
            }
            if self.sandwich.is_empty() {
                return bad("the sandwich check needs at least one (r, R) pair".into());
            }
            for p in &self.sandwich {
                if !(p.r > 0.0 && p.r < p.big_r && fits(p.big_r + p.r)) {
                    return bad(format!(
                        "sandwich pair r = {}, R = {} needs 0 < r < R and B(R + r) in the window",
                        p.r, p.big_r
                    ));
                }
            }
        }
        if self.has(Check::Covariance) {
            if self.grid.dim() != 2 || matches!(self.grid, GridSpec::LatLongSphere { .. }) {
                return bad("the covariance check needs a flat 2-D grid".into());
            }
            let span = self.grid.spacing() * (self.grid.shape()[0] - 1) as f64;
            if let Some(&l) = self.covariance_lags.iter().find(|&&l| !(l >= 0.0 && l < span)) {
                return bad(format!("covariance lag {l} does not fit the grid"));
            }
        }
        if self.has(Check::Perturbation) {
            if self.perturbation_b.is_empty() || self.perturbation_b.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
                return bad(format!("perturbation sizes {:?} must be finite and non-negative", self.perturbation_b));
            }
            if self.grid.dim() != 2 {
                return bad("the perturbation check needs a 2-D grid".into());
            }
        }
        if self.has(Check::Helmholtz) && self.grid.dim() != 2 {
            return bad("the Helmholtz check needs a 2-D grid".into());
        }
        Ok(())
    }

    /// Sorted-key JSON of everything that determines the results, without
    /// `output_dir` and `keep_fields`.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output_dir");
            map.remove("keep_fields");
        }
        v.to_string()
    }

    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical_json().as_bytes())
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
