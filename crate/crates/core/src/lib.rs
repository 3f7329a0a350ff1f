pub mod engine;
pub mod error;
pub mod nodal;
pub mod sampler;
pub mod specfn;
pub mod stats;

pub use error::{Error, Result};
