use serde::{Deserialize, Serialize};

use super::bessel::normalized_bessel;
use crate::error::{Error, Result};

/// Wavenumber convention for the closed-form kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum KernelConvention {
    /// Unit wavenumber, `K(0) = 1`: the Fourier transform is taken with
    /// `exp(i <w, xi>)` over the unit annulus.
    #[default]
    UnitWavenumber,
}

/// Covariance of the isotropic field whose spectral measure is uniform on
/// the annulus `alpha <= |xi| <= 1` in `R^n` (surface measure when `alpha = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceKernel {
    dim: usize,
    alpha: f64,
    convention: KernelConvention,
}

impl CovarianceKernel {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("kernel dimension must be at least 2, got {dim}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("annulus inner radius must lie in [0, 1], got {alpha}")));
        }
        Ok(Self { dim, alpha, convention: KernelConvention::UnitWavenumber })
    }

    /// The random plane wave kernel `J_0(r)`.
    pub fn plane_wave() -> Self {
        Self { dim: 2, alpha: 1.0, convention: KernelConvention::UnitWavenumber }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn convention(&self) -> KernelConvention {
        self.convention
    }

    /// `K(r)` for `r >= 0`.
    ///
    /// With `L_nu(z) = Gamma(nu+1) (2/z)^nu J_nu(z)`, the sphere kernel is
    /// `L_{n/2-1}(r)` and the annulus average integrates in closed form to
    /// `(L_{n/2}(r) - alpha^n L_{n/2}(alpha r)) / (1 - alpha^n)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Domain(format!("kernel lag must be finite and non-negative, got {r}")));
        }
        let n = self.dim as f64;
        if self.alpha == 1.0 {
            return normalized_bessel(0.5 * n - 1.0, r);
        }
        let nu = 0.5 * n;
        let an = self.alpha.powi(self.dim as i32);
        let outer = normalized_bessel(nu, r)?;
        let inner = if an == 0.0 { 0.0 } else { an * normalized_bessel(nu, self.alpha * r)? };
        Ok((outer - inner) / (1.0 - an))
    }

    /// `-K''(0)`: the variance of each gradient component of the unit-variance field.
    pub fn gradient_variance(&self) -> f64 {
        // L_nu(z) = 1 - z^2 / (4 (nu + 1)) + ..., averaged over the shell with
        // weight s^{n-1}: E|xi|^2 / n.
        let n = self.dim as f64;
        let a = self.alpha;
        let second_moment = if a == 1.0 { 1.0 } else { n / (n + 2.0) * (1.0 - a.powf(n + 2.0)) / (1.0 - a.powf(n)) };
        second_moment / n
    }
}
