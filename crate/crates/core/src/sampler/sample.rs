use serde::{Deserialize, Serialize};

use super::model::{GridSpec, SpectralModel};
use crate::error::{Error, Result};

/// One realization of a field on a grid, with the provenance that fully
/// determines it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub model: SpectralModel,
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

impl FieldSample {
    /// Wrap externally computed values. Shape and finiteness are checked; the
    /// model is only metadata here.
    pub fn synthetic(model: SpectralModel, grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value array has {} entries, grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {i}")));
        }
        Ok(Self { model, grid, values, seed: 0, index: 0 })
    }

    /// Evaluate a function of position at every node of a planar or 2-D torus grid.
    pub fn from_fn(model: SpectralModel, grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.node_count())
            .map(|idx| {
                let [x, y] = grid.position(idx);
                f(x, y)
            })
            .collect();
        Self::synthetic(model, grid, values)
    }

    pub fn with_provenance(mut self, seed: u64, index: u64) -> Self {
        self.seed = seed;
        self.index = index;
        self
    }

    pub fn same_layout(&self, other: &FieldSample) -> bool {
        self.model == other.model && self.grid == other.grid
    }
}
