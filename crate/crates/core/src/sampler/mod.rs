//! Gaussian ensembles on structured grids.

pub mod diagnostics;
pub mod model;
pub mod ncfs;
pub mod plane_wave;
pub mod rng;
pub mod sample;
pub mod sphere;
pub mod torus;

pub use diagnostics::{
    empirical_covariance, helmholtz_residual, mean_and_stderr, moments, node_values, probe_product,
    spherical_laplacian_residual, CovarianceEstimate, Moments,
};
pub use model::{validate_pair, GridSpec, SpectralAxioms, SpectralModel, DEFAULT_SPACING, MAX_SPACING};
pub use ncfs::{read_ncfs, write_ncfs, Sidecar};
pub use plane_wave::{sample_plane_wave, truncation_order, PlaneWaveCoefficients, MAX_EXPANSION_RADIUS};
pub use rng::{GaussianDraws, RngStream};
pub use sample::FieldSample;
pub use sphere::{normalized_legendre_row, sample_spherical_harmonic, HarmonicCoefficients};
pub use torus::{annulus_frequencies, band_limited_coefficients, sample_band_limited, BandLimitedRealization};

use crate::error::Result;

/// Draw realization `rng` of any model on a compatible grid.
pub fn sample(model: &SpectralModel, grid: &GridSpec, rng: &RngStream) -> Result<FieldSample> {
    match *model {
        SpectralModel::PlaneWave2D => sample_plane_wave(rng, grid),
        SpectralModel::BandLimitedTorus { .. } => sample_band_limited(rng, model, grid),
        SpectralModel::SphericalHarmonic { degree } => sample_spherical_harmonic(rng, degree, grid),
    }
}
