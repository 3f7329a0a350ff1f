//! Special functions: Bessel `J_nu`, its positive zeros, and the closed-form
//! covariance kernels of the annulus ensembles.

mod bessel;
mod kernel;
mod zeros;

pub use bessel::{bessel_j, bessel_j_integer_orders, BesselOrder, MAX_ORDER};
pub use kernel::{CovarianceKernel, KernelConvention};
pub use zeros::{bessel_zero, faber_krahn_floor};

/// `j_{0,1}`, the first positive zero of `J_0`.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
