use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// A reproducible Gaussian stream addressed by `(master_seed, stream_id)`.
///
/// Backed by ChaCha8, a counter-based generator: the stream id selects an
/// independent keystream, so realizations can be drawn in any order or in
/// parallel and still reproduce bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Stream used for the perturbation direction paired with realization `index`.
    pub fn perturbation(master_seed: u64, index: u64) -> Self {
        Self::new(master_seed, index | (1 << 63))
    }

    pub fn gaussians(&self) -> GaussianDraws {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        GaussianDraws { rng }
    }
}

pub struct GaussianDraws {
    rng: ChaCha8Rng,
}

impl GaussianDraws {
    pub fn next_gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl Iterator for GaussianDraws {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_gaussian())
    }
}
