use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cdf::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::nodal::{ball_membership, AreaEstimator, NodalDecomposition};
use crate::sampler::{mean_and_stderr, GridSpec};
use crate::specfn::faber_krahn_floor;

/// Region whose domains enter an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// Domains lying in the open ball, by node position.
    Ball { center: [f64; 2], radius: f64 },
    /// Every domain that does not touch the grid edge (the whole sphere or torus).
    Whole,
}

impl Window {
    /// Ball about the centre of a planar window or torus.
    pub fn centred(grid: &GridSpec, radius: f64) -> Self {
        Window::Ball { center: grid_center(grid), radius }
    }
}

pub fn grid_center(grid: &GridSpec) -> [f64; 2] {
    match *grid {
        GridSpec::Torus { side, .. } => [0.5 * side, 0.5 * side],
        _ => [0.0, 0.0],
    }
}

fn selected(dec: &NodalDecomposition, window: &Window) -> Result<Vec<bool>> {
    let interior = dec.domains.iter().map(|d| d.is_interior());
    match *window {
        Window::Whole => Ok(interior.collect()),
        Window::Ball { center, radius } => {
            let m = ball_membership(dec, center, radius)?;
            Ok(interior.zip(m.inside).map(|(a, b)| a && b).collect())
        }
    }
}

fn check_layout(decs: &[NodalDecomposition]) -> Result<()> {
    let first = decs.first().ok_or_else(|| Error::Empty("no decompositions".into()))?;
    if let Some(k) = decs.iter().position(|d| !d.sample.same_layout(&first.sample)) {
        return Err(Error::Mismatch(format!("decomposition {k} differs in model or grid from the first")));
    }
    Ok(())
}

/// Areas (times `volume_scale`) of the interior domains inside `window`,
/// pooled over the decompositions.
pub fn scaled_areas(
    decs: &[NodalDecomposition],
    window: &Window,
    volume_scale: f64,
    estimator: AreaEstimator,
) -> Result<Vec<f64>> {
    check_layout(decs)?;
    if !(volume_scale.is_finite() && volume_scale > 0.0) {
        return Err(Error::Domain(format!("volume scale {volume_scale} must be positive")));
    }
    let mut out = Vec::new();
    for dec in decs {
        let keep = selected(dec, window)?;
        out.extend(dec.domains.iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| d.area_by(estimator) * volume_scale));
    }
    Ok(out)
}

/// Empirical distribution of scaled domain areas.
pub fn psi_estimate(
    decs: &[NodalDecomposition],
    window: &Window,
    volume_scale: f64,
    estimator: AreaEstimator,
) -> Result<EmpiricalCdf> {
    let areas = scaled_areas(decs, window, volume_scale, estimator)?;
    if areas.is_empty() {
        return Err(Error::Empty("no interior domains in the estimation window".into()));
    }
    EmpiricalCdf::from_observations(&areas)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsRow {
    pub radius: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsEstimate {
    pub rows: Vec<NsRow>,
    /// Mean at the largest radius.
    pub c_hat: f64,
    pub stderr: f64,
}

/// Per radius, the mean over realizations of the number of domains inside
/// the centred ball divided by its area (volume in 3-D is not supported).
pub fn ns_constant_estimate(decs: &[NodalDecomposition], radii: &[f64]) -> Result<NsEstimate> {
    check_layout(decs)?;
    if radii.is_empty() {
        return Err(Error::Empty("no radii".into()));
    }
    let grid = decs[0].sample.grid;
    let center = grid_center(&grid);
    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        let ratios = decs
            .iter()
            .map(|dec| {
                let m = ball_membership(dec, center, radius)?;
                Ok(m.inside.iter().filter(|&&b| b).count() as f64 / (PI * radius * radius))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, stderr) = mean_and_stderr(&ratios);
        rows.push(NsRow { radius, mean, stderr });
    }
    let largest = *rows.iter().max_by(|a, b| a.radius.total_cmp(&b.radius)).expect("non-empty");
    Ok(NsEstimate { c_hat: largest.mean, stderr: largest.stderr, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkViolation {
    pub seed: u64,
    pub index: u64,
    pub label: u32,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkReport {
    pub floor: f64,
    pub margin: f64,
    pub threshold: f64,
    #[serde(with = "super::extended_f64")]
    pub min_area: f64,
    pub interior_domains: usize,
    pub violations: Vec<FkViolation>,
}

/// Smallest interior domain area against `(1 - margin)` times the planar floor.
pub fn faber_krahn_check(decs: &[NodalDecomposition], margin: f64, estimator: AreaEstimator) -> Result<FkReport> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::Domain(format!("margin {margin} must lie in [0, 1)")));
    }
    let floor = faber_krahn_floor(2)?;
    let threshold = (1.0 - margin) * floor;
    let mut min_area = f64::INFINITY;
    let mut count = 0;
    let mut violations = Vec::new();
    for dec in decs {
        for d in dec.interior() {
            let a = d.area_by(estimator);
            count += 1;
            min_area = min_area.min(a);
            if a < threshold {
                violations.push(FkViolation {
                    seed: dec.sample.seed,
                    index: dec.sample.index,
                    label: d.label,
                    area: a,
                });
            }
        }
    }
    if count == 0 {
        return Err(Error::Empty("no interior domains, minimum area undefined".into()));
    }
    Ok(FkReport { floor, margin, threshold, min_area, interior_domains: count, violations })
}

/// Perimeter distribution and `(area, perimeter)` pairs of the interior
/// domains inside `window`.
pub fn boundary_and_joint_distributions(
    decs: &[NodalDecomposition],
    window: &Window,
    estimator: AreaEstimator,
) -> Result<(EmpiricalCdf, Vec<(f64, f64)>)> {
    check_layout(decs)?;
    let mut pairs = Vec::new();
    for dec in decs {
        let keep = selected(dec, window)?;
        pairs
            .extend(dec.domains.iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| (d.area_by(estimator), d.perimeter)));
    }
    if pairs.is_empty() {
        return Err(Error::Empty("no interior domains in the estimation window".into()));
    }
    let perimeters: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok((EmpiricalCdf::from_observations(&perimeters)?, pairs))
}

/// Total nodal line length per unit area of the traced region (primal cells),
/// one value per decomposition.
pub fn nodal_length_density(dec: &NodalDecomposition) -> Result<f64> {
    let grid = dec.grid();
    let area = match *grid {
        GridSpec::PlanarWindow { side, .. } | GridSpec::Torus { side, dim: 2, .. } => side * side,
        _ => return Err(Error::Mismatch("nodal length density needs a flat 2-D grid".into())),
    };
    if !dec.measured {
        return Err(Error::Config("decomposition has not been measured".into()));
    }
    Ok(dec.nodal_length / area)
}

/// Cells whose discrete gradient components both change sign across the
/// four corners, per unit area. Central differences at interior nodes.
pub fn critical_cell_density(dec: &NodalDecomposition) -> Result<f64> {
    let grid = dec.grid();
    let (n, periodic) = match *grid {
        GridSpec::PlanarWindow { .. } => (grid.shape()[0], false),
        GridSpec::Torus { dim: 2, .. } => (grid.shape()[0], true),
        _ => return Err(Error::Mismatch("critical cells need a flat 2-D grid".into())),
    };
    let v = &dec.sample.values;
    let at = |i: usize, j: usize| v[(j % n) * n + (i % n)];
    let grad = |i: usize, j: usize| {
        let (im, jm) = ((i + n - 1) % n, (j + n - 1) % n);
        (at(i + 1, j) - at(im, j), at(i, j + 1) - at(i, jm))
    };
    let (lo, hi) = if periodic { (0, n) } else { (1, n - 2) };
    let mut count = 0usize;
    for j in lo..hi {
        for i in lo..hi {
            let g = [grad(i, j), grad(i + 1, j), grad(i + 1, j + 1), grad(i, j + 1)];
            let changes = |f: fn(&(f64, f64)) -> f64| {
                let pos = g.iter().filter(|c| f(c) >= 0.0).count();
                pos != 0 && pos != 4
            };
            if changes(|c| c.0) && changes(|c| c.1) {
                count += 1;
            }
        }
    }
    let h = grid.spacing();
    let cells = ((hi - lo) * (hi - lo)) as f64;
    Ok(count as f64 / (cells * h * h))
}
