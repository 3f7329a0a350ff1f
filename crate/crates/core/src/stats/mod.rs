//! Estimators over ensembles of nodal decompositions.

mod cdf;
mod estimates;
pub mod export;
pub mod extended_f64;
mod sandwich;

pub use cdf::{ks_distance, EmpiricalCdf};
pub use estimates::{
    boundary_and_joint_distributions, critical_cell_density, faber_krahn_check, grid_center, nodal_length_density,
    ns_constant_estimate, psi_estimate, scaled_areas, FkReport, FkViolation, NsEstimate, NsRow, Window,
};
pub use sandwich::{sandwich_check, SandwichVerdict};
