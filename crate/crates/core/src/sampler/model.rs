use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfn::CovarianceKernel;

/// Finest allowed grid spacing ratio: at least 8 nodes per wavelength `2 pi`.
pub const MAX_SPACING: f64 = 2.0 * PI / 8.0;
/// Default spacing: 10 nodes per wavelength.
pub const DEFAULT_SPACING: f64 = 2.0 * PI / 10.0;

/// Which Gaussian ensemble is sampled. Every model is normalized to unit
/// variance at every point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralModel {
    /// Random plane wave on `R^2`, covariance `J_0(|x-y|)`.
    #[serde(rename = "plane_wave")]
    PlaneWave2D,
    /// Band-limited field on a flat torus: spectral measure uniform on the
    /// annulus `alpha <= |xi| <= 1` in `R^dim`.
    BandLimitedTorus { dim: usize, alpha: f64 },
    /// Random spherical harmonic of the given degree on the unit sphere.
    SphericalHarmonic { degree: usize },
}

/// The Nazarov-Sodin axioms on the spectral measure, as far as they can be
/// read off the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralAxioms {
    /// (rho1): the spectral measure has no atoms.
    pub atomless: bool,
    /// (rho2): a moment of order > 4 is finite.
    pub finite_moments: bool,
    /// (rho3): the support is not contained in a hyperplane.
    pub not_in_hyperplane: bool,
    /// (rho4*): the support has non-empty interior.
    pub interior_support: bool,
}

impl SpectralModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralModel::PlaneWave2D => Ok(()),
            SpectralModel::BandLimitedTorus { dim, alpha } => {
                if !(2..=3).contains(&dim) {
                    return Err(Error::InvalidModel(format!("torus dimension must be 2 or 3, got {dim}")));
                }
                if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::InvalidModel(format!("alpha must lie in [0, 1], got {alpha}")));
                }
                Ok(())
            }
            SpectralModel::SphericalHarmonic { degree } => {
                if degree < 1 {
                    return Err(Error::InvalidModel("spherical harmonic degree must be at least 1".into()));
                }
                Ok(())
            }
        }
    }

    pub fn axioms(&self) -> SpectralAxioms {
        match *self {
            SpectralModel::PlaneWave2D | SpectralModel::SphericalHarmonic { .. } => SpectralAxioms {
                atomless: true,
                finite_moments: true,
                not_in_hyperplane: true,
                interior_support: false,
            },
            SpectralModel::BandLimitedTorus { alpha, .. } => SpectralAxioms {
                atomless: true,
                finite_moments: true,
                not_in_hyperplane: true,
                interior_support: alpha < 1.0,
            },
        }
    }

    /// Covariance kernel of the Euclidean scaling limit.
    pub fn kernel(&self) -> Result<CovarianceKernel> {
        match *self {
            SpectralModel::PlaneWave2D | SpectralModel::SphericalHarmonic { .. } => Ok(CovarianceKernel::plane_wave()),
            SpectralModel::BandLimitedTorus { dim, alpha } => CovarianceKernel::new(dim, alpha),
        }
    }

    /// Factor that converts sample volumes into unit-wavenumber volumes:
    /// 1 in the Euclidean ensembles, `l(l+1)` on the sphere.
    pub fn volume_scale(&self) -> f64 {
        match *self {
            SpectralModel::SphericalHarmonic { degree } => (degree * (degree + 1)) as f64,
            _ => 1.0,
        }
    }

    pub fn short_name(&self) -> String {
        match *self {
            SpectralModel::PlaneWave2D => "rpw".into(),
            SpectralModel::BandLimitedTorus { dim, alpha } => format!("band(n={dim},alpha={alpha})"),
            SpectralModel::SphericalHarmonic { degree } => format!("sphere(l={degree})"),
        }
    }
}

/// Grid geometry. Planar and torus lengths are in unit-wavenumber units
/// (wavelength `2 pi`); the sphere grid is in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "snake_case")]
pub enum GridSpec {
    /// Square window `[-side/2, side/2]^2` with nodes every `spacing`,
    /// including both edges.
    PlanarWindow { side: f64, spacing: f64 },
    /// Periodic cube `[0, side)^dim` with `side / spacing` nodes per axis.
    Torus { side: f64, spacing: f64, dim: usize },
    /// Cell-centred colatitude rows `theta_i = (i + 1/2) pi / n_theta` and
    /// longitudes `phi_j = 2 pi j / n_phi`.
    LatLongSphere { n_theta: usize, n_phi: usize },
}

impl GridSpec {
    pub fn planar(side: f64, spacing: f64) -> Result<Self> {
        let grid = GridSpec::PlanarWindow { side, spacing };
        grid.validate()?;
        Ok(grid)
    }

    pub fn torus(side: f64, spacing: f64, dim: usize) -> Result<Self> {
        let grid = GridSpec::Torus { side, spacing, dim };
        grid.validate()?;
        Ok(grid)
    }

    pub fn sphere(n_theta: usize, n_phi: usize) -> Result<Self> {
        let grid = GridSpec::LatLongSphere { n_theta, n_phi };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GridSpec::PlanarWindow { side, spacing } | GridSpec::Torus { side, spacing, .. } => {
                if !(side.is_finite() && spacing.is_finite()) || side <= 0.0 || spacing <= 0.0 {
                    return Err(Error::InvalidGrid(format!("side {side} and spacing {spacing} must be positive")));
                }
                if spacing > MAX_SPACING * (1.0 + 1e-12) {
                    return Err(Error::InvalidGrid(format!(
                        "spacing {spacing:.6} is coarser than 2pi/8 = {MAX_SPACING:.6} (fewer than 8 nodes per wavelength)"
                    )));
                }
                let ratio = side / spacing;
                if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                    return Err(Error::InvalidGrid(format!("side/spacing = {ratio} is not an integer")));
                }
                if ratio.round() < 2.0 {
                    return Err(Error::InvalidGrid("grid needs at least two cells per axis".into()));
                }
                if let GridSpec::Torus { dim, .. } = *self {
                    if !(2..=3).contains(&dim) {
                        return Err(Error::InvalidGrid(format!("torus dimension must be 2 or 3, got {dim}")));
                    }
                }
                Ok(())
            }
            GridSpec::LatLongSphere { n_theta, n_phi } => {
                if n_theta < 4 || n_phi < 4 {
                    return Err(Error::InvalidGrid("sphere grid needs at least 4 nodes per direction".into()));
                }
                if n_phi % 2 != 0 {
                    return Err(Error::InvalidGrid("n_phi must be even so that rows pair across the poles".into()));
                }
                Ok(())
            }
        }
    }

    /// Cells per axis (planar, torus) or `n_theta` for the sphere.
    pub fn cells_per_side(&self) -> usize {
        match *self {
            GridSpec::PlanarWindow { side, spacing } | GridSpec::Torus { side, spacing, .. } => {
                (side / spacing).round() as usize
            }
            GridSpec::LatLongSphere { n_theta, .. } => n_theta,
        }
    }

    /// Node counts per axis, x fastest.
    pub fn shape(&self) -> Vec<usize> {
        match *self {
            GridSpec::PlanarWindow { .. } => {
                let n = self.cells_per_side() + 1;
                vec![n, n]
            }
            GridSpec::Torus { dim, .. } => vec![self.cells_per_side(); dim],
            GridSpec::LatLongSphere { n_theta, n_phi } => vec![n_phi, n_theta],
        }
    }

    pub fn node_count(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn spacing(&self) -> f64 {
        match *self {
            GridSpec::PlanarWindow { spacing, .. } | GridSpec::Torus { spacing, .. } => spacing,
            GridSpec::LatLongSphere { n_theta, .. } => PI / n_theta as f64,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            GridSpec::Torus { dim, .. } => dim,
            _ => 2,
        }
    }

    pub fn is_periodic(&self) -> bool {
        !matches!(self, GridSpec::PlanarWindow { .. })
    }

    /// Coordinate of node index `i` along a planar or torus axis.
    pub fn axis_coordinate(&self, i: usize) -> f64 {
        match *self {
            GridSpec::PlanarWindow { spacing, .. } => (i as f64 - 0.5 * self.cells_per_side() as f64) * spacing,
            GridSpec::Torus { spacing, .. } => i as f64 * spacing,
            GridSpec::LatLongSphere { n_theta, .. } => (i as f64 + 0.5) * PI / n_theta as f64,
        }
    }

    /// Planar or 2-D torus position of the node with flat index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let nx = self.shape()[0];
        [self.axis_coordinate(idx % nx), self.axis_coordinate((idx / nx) % nx)]
    }

    /// Colatitude and longitude of a sphere node.
    pub fn sphere_angles(&self, idx: usize) -> Option<(f64, f64)> {
        match *self {
            GridSpec::LatLongSphere { n_theta, n_phi } => {
                let (i, j) = (idx / n_phi, idx % n_phi);
                Some(((i as f64 + 0.5) * PI / n_theta as f64, 2.0 * PI * j as f64 / n_phi as f64))
            }
            _ => None,
        }
    }

    /// Area (volume in 3-D) represented by each node: `h^dim` for flat grids,
    /// the exact latitude-strip cell area on the sphere.
    pub fn node_weights(&self) -> Vec<f64> {
        match *self {
            GridSpec::PlanarWindow { spacing, .. } => vec![spacing * spacing; self.node_count()],
            GridSpec::Torus { spacing, dim, .. } => vec![spacing.powi(dim as i32); self.node_count()],
            GridSpec::LatLongSphere { n_theta, n_phi } => {
                let dphi = 2.0 * PI / n_phi as f64;
                let mut weights = Vec::with_capacity(n_theta * n_phi);
                for i in 0..n_theta {
                    let top = (i as f64 * PI / n_theta as f64).cos();
                    let bottom = ((i + 1) as f64 * PI / n_theta as f64).cos();
                    let w = dphi * (top - bottom);
                    weights.extend(std::iter::repeat_n(w, n_phi));
                }
                weights
            }
        }
    }

    /// Total measure of the domain covered by the node cells.
    pub fn total_measure(&self) -> f64 {
        match *self {
            GridSpec::LatLongSphere { .. } => 4.0 * PI,
            _ => self.node_weights().iter().sum(),
        }
    }

    /// Half the side of a planar window: the largest radius of a centred ball
    /// that stays inside it.
    pub fn half_side(&self) -> Option<f64> {
        match *self {
            GridSpec::PlanarWindow { side, .. } | GridSpec::Torus { side, .. } => Some(0.5 * side),
            GridSpec::LatLongSphere { .. } => None,
        }
    }
}

/// Check that a model can be sampled on a grid.
pub fn validate_pair(model: &SpectralModel, grid: &GridSpec) -> Result<()> {
    model.validate()?;
    grid.validate()?;
    match (model, grid) {
        (SpectralModel::PlaneWave2D, GridSpec::PlanarWindow { .. }) => Ok(()),
        (SpectralModel::BandLimitedTorus { dim, .. }, GridSpec::Torus { dim: gdim, side, .. }) if dim == gdim => {
            let min_side = super::torus::MIN_TORUS_WAVELENGTHS * 2.0 * PI;
            if *side < min_side * (1.0 - 1e-12) {
                return Err(Error::InvalidGrid(format!(
                    "torus side {side:.4} is below 20 wavelengths ({min_side:.4})"
                )));
            }
            Ok(())
        }
        (SpectralModel::SphericalHarmonic { degree }, GridSpec::LatLongSphere { n_theta, n_phi }) => {
            if *n_theta < 4 * degree || *n_phi < 4 * degree {
                return Err(Error::InvalidGrid(format!(
                    "sphere grid {n_theta}x{n_phi} is below 4l = {} nodes per direction (aliasing)",
                    4 * degree
                )));
            }
            Ok(())
        }
        _ => Err(Error::Mismatch(format!("model {} cannot be sampled on {:?}", model.short_name(), grid))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_or_fractional_grids() {
        assert!(GridSpec::planar(40.0 * PI, 2.0 * PI / 7.0).is_err());
        assert!(GridSpec::planar(10.0, 0.3).is_err());
        assert!(GridSpec::planar(40.0 * PI, DEFAULT_SPACING).is_ok());
        assert!(GridSpec::torus(40.0 * PI, DEFAULT_SPACING, 4).is_err());
        assert!(GridSpec::sphere(3, 8).is_err());
        assert!(GridSpec::sphere(8, 9).is_err());
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(SpectralModel::BandLimitedTorus { dim: 2, alpha: 1.2 }.validate().is_err());
        assert!(SpectralModel::BandLimitedTorus { dim: 1, alpha: 0.5 }.validate().is_err());
        assert!(SpectralModel::SphericalHarmonic { degree: 0 }.validate().is_err());
    }

    #[test]
    fn planar_window_is_centred() {
        let grid = GridSpec::planar(4.0 * PI, 2.0 * PI / 10.0).unwrap();
        assert_eq!(grid.shape(), vec![21, 21]);
        assert_eq!(grid.axis_coordinate(10), 0.0);
        assert!((grid.axis_coordinate(0) + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_weights_sum_to_full_solid_angle() {
        let grid = GridSpec::sphere(37, 74).unwrap();
        let total: f64 = grid.node_weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_resolution_floor() {
        let model = SpectralModel::SphericalHarmonic { degree: 10 };
        assert!(validate_pair(&model, &GridSpec::sphere(39, 80).unwrap()).is_err());
        assert!(validate_pair(&model, &GridSpec::sphere(40, 80).unwrap()).is_ok());
    }

    #[test]
    fn axioms_reflect_annulus_interior() {
        assert!(SpectralModel::BandLimitedTorus { dim: 2, alpha: 0.5 }.axioms().interior_support);
        assert!(!SpectralModel::BandLimitedTorus { dim: 2, alpha: 1.0 }.axioms().interior_support);
        assert!(!SpectralModel::PlaneWave2D.axioms().interior_support);
    }
}
