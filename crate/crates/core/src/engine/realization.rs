//! One realization: sample, label, measure, restrict, and reduce to the
//! numbers the aggregator folds.

use serde::{Deserialize, Serialize};

use super::config::{Check, EnsembleConfig};
use crate::error::Result;
use crate::nodal::{ball_membership, decompose, nesting_graph, perturbation_stability, NodalDecomposition};
use crate::sampler::{
    helmholtz_residual, probe_product, sample, spherical_laplacian_residual, FieldSample, GridSpec, RngStream,
};
use crate::stats::{grid_center, nodal_length_density, sandwich_check, SandwichVerdict, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkPart {
    pub min_area: Option<f64>,
    pub violations: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelmholtzPart {
    pub residual: f64,
    /// Residual of the same realization on the grid with half the spacing.
    pub refined_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPart {
    pub b: f64,
    pub median_delta_area: Option<f64>,
    pub one_to_one_fraction: f64,
}

/// Everything the report needs from one realization. Persisted next to its
/// domain table so a resumed run can re-aggregate without sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationSummary {
    pub index: u64,
    pub domain_count: usize,
    pub interior_count: usize,
    /// Scaled areas of the interior domains in the estimation window.
    pub psi_areas: Vec<f64>,
    /// Unscaled `(area, perimeter)` of the same domains.
    pub joint: Vec<(f64, f64)>,
    /// Domains inside each ball of `config.radii`.
    pub ns_counts: Vec<usize>,
    pub nodal_length_density: Option<f64>,
    pub nesting_acyclic: bool,
    pub faber_krahn: Option<FkPart>,
    pub sandwich: Vec<SandwichVerdict>,
    pub helmholtz: Option<HelmholtzPart>,
    /// Per requested lag: `(snapped lag, mean probe product)`.
    pub covariance: Vec<(f64, f64)>,
    pub perturbation: Vec<PerturbationPart>,
}

/// The grid with half the spacing (twice the resolution on the sphere).
fn refined(grid: &GridSpec) -> GridSpec {
    match *grid {
        GridSpec::PlanarWindow { side, spacing } => GridSpec::PlanarWindow { side, spacing: 0.5 * spacing },
        GridSpec::Torus { side, spacing, dim } => GridSpec::Torus { side, spacing: 0.5 * spacing, dim },
        GridSpec::LatLongSphere { n_theta, n_phi } => {
            GridSpec::LatLongSphere { n_theta: 2 * n_theta, n_phi: 2 * n_phi }
        }
    }
}

fn residual(sample: &FieldSample) -> Result<f64> {
    match sample.grid {
        GridSpec::LatLongSphere { .. } => spherical_laplacian_residual(sample),
        _ => helmholtz_residual(sample),
    }
}

pub fn draw(config: &EnsembleConfig, index: u64) -> Result<FieldSample> {
    sample(&config.model, &config.grid, &RngStream::new(config.master_seed, index))
}

pub fn summarize(config: &EnsembleConfig, index: u64, dec: &NodalDecomposition) -> Result<RealizationSummary> {
    let estimator = config.area_estimator;
    let scale = config.model.volume_scale();
    let keep: Vec<bool> = match config.psi_radius {
        Some(r) => {
            let Window::Ball { center, radius } = Window::centred(dec.grid(), r) else { unreachable!() };
            let m = ball_membership(dec, center, radius)?;
            dec.domains.iter().zip(m.inside).map(|(d, inside)| inside && d.is_interior()).collect()
        }
        None => dec.domains.iter().map(|d| d.is_interior()).collect(),
    };
    let chosen = || dec.domains.iter().zip(&keep).filter(|(_, k)| **k).map(|(d, _)| d);
    let psi_areas = chosen().map(|d| d.area_by(estimator) * scale).collect();
    let joint = chosen().map(|d| (d.area_by(estimator), d.perimeter)).collect();

    let center = grid_center(dec.grid());
    let ns_counts = config
        .radii
        .iter()
        .map(|&r| Ok(ball_membership(dec, center, r)?.inside.iter().filter(|&&b| b).count()))
        .collect::<Result<_>>()?;

    let faber_krahn = config.has(Check::FaberKrahn).then(|| {
        let floor = crate::specfn::faber_krahn_floor(2).expect("planar floor");
        let threshold = (1.0 - config.fk_margin) * floor;
        let areas: Vec<(u32, f64)> = dec.interior().map(|d| (d.label, d.area_by(config.fk_estimator))).collect();
        let min_area = areas.iter().map(|&(_, a)| a).min_by(f64::total_cmp);
        FkPart { min_area, violations: areas.into_iter().filter(|&(_, a)| a < threshold).collect() }
    });

    let mut sandwich = Vec::new();
    if config.has(Check::Sandwich) {
        let ts = config.thresholds.iter().copied().chain([f64::INFINITY]);
        for pair in &config.sandwich {
            for t in ts.clone() {
                sandwich.push(sandwich_check(dec, pair.r, pair.big_r, t, estimator)?);
            }
        }
    }

    let helmholtz = if config.has(Check::Helmholtz) {
        let fine = sample(&config.model, &refined(&config.grid), &RngStream::new(config.master_seed, index))?;
        Some(HelmholtzPart { residual: residual(&dec.sample)?, refined_residual: residual(&fine)? })
    } else {
        None
    };

    let covariance = if config.has(Check::Covariance) {
        config.covariance_lags.iter().map(|&l| probe_product(&dec.sample, l)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut perturbation = Vec::new();
    if config.has(Check::Perturbation) {
        let direction = sample(&config.model, &config.grid, &RngStream::perturbation(config.master_seed, index))?;
        for &b in &config.perturbation_b {
            let rep = perturbation_stability(&dec.sample, &direction, b)?;
            perturbation.push(PerturbationPart {
                b,
                median_delta_area: rep.median_delta_area(),
                one_to_one_fraction: rep.one_to_one_fraction,
            });
        }
    }

    Ok(RealizationSummary {
        index,
        domain_count: dec.domain_count(),
        interior_count: dec.interior().count(),
        psi_areas,
        joint,
        ns_counts,
        nodal_length_density: nodal_length_density(dec).ok(),
        nesting_acyclic: nesting_graph(dec).is_interior_acyclic(),
        faber_krahn,
        sandwich,
        helmholtz,
        covariance,
        perturbation,
    })
}

/// Sample and reduce realization `index`; also returns the decomposition so
/// the caller can persist its table.
pub fn run_one(config: &EnsembleConfig, index: u64) -> Result<(NodalDecomposition, RealizationSummary)> {
    let dec = decompose(&draw(config, index)?);
    let summary = summarize(config, index, &dec)?;
    Ok((dec, summary))
}
