//! Random plane wave by its Fourier-Bessel series about the window centre:
//!
//! `F(r, theta) = a_0 J_0(r) + sqrt(2) sum_{n>=1} J_n(r) (a_n cos n theta + b_n sin n theta)`
//!
//! which is the real form of `sum_n c_n J_|n|(r) e^{i n theta}` with
//! `c_{-n} = conj(c_n)`. Graf's addition theorem gives covariance `J_0(|x-y|)`.

use std::f64::consts::SQRT_2;

use super::model::{validate_pair, GridSpec, SpectralModel};
use super::rng::RngStream;
use super::sample::FieldSample;
use crate::error::{Error, Result};
use crate::specfn::bessel_j_integer_orders;

/// Windows whose farthest node lies beyond this radius are rejected.
pub const MAX_EXPANSION_RADIUS: f64 = 300.0;

/// Truncation order for a series evaluated out to radius `r_max`; beyond the
/// turning point `J_n(r)` decays super-exponentially.
pub fn truncation_order(r_max: f64) -> usize {
    (r_max + 7.0 * r_max.cbrt() + 10.0).ceil() as usize
}

/// The coefficients `(a_0, [(a_n, b_n)])` of one realization.
#[derive(Debug, Clone)]
pub struct PlaneWaveCoefficients {
    pub a0: f64,
    pub pairs: Vec<(f64, f64)>,
}

impl PlaneWaveCoefficients {
    pub fn draw(rng: &RngStream, order: usize) -> Self {
        let mut draws = rng.gaussians();
        let a0 = draws.next_gaussian();
        let pairs = (0..order).map(|_| (draws.next_gaussian(), draws.next_gaussian())).collect();
        Self { a0, pairs }
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Field value at a point given in polar coordinates about the expansion centre.
    pub fn eval_polar(&self, r: f64, theta: f64) -> f64 {
        let bessel = bessel_j_integer_orders(r, self.order());
        self.sum_series(&bessel, theta)
    }

    fn sum_series(&self, bessel: &[f64], theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = 0.0;
        for (n, &(a, b)) in self.pairs.iter().enumerate() {
            // rotate (cos n theta, sin n theta) by theta
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
            acc += bessel[n + 1] * (a * c + b * s);
        }
        self.a0 * bessel[0] + SQRT_2 * acc
    }
}

pub fn sample_plane_wave(rng: &RngStream, grid: &GridSpec) -> Result<FieldSample> {
    validate_pair(&SpectralModel::PlaneWave2D, grid)?;
    let half = grid.half_side().expect("planar grid");
    let r_max = half * std::f64::consts::SQRT_2;
    if r_max > MAX_EXPANSION_RADIUS {
        return Err(Error::InvalidGrid(format!(
            "window corner radius {r_max:.1} exceeds the series limit {MAX_EXPANSION_RADIUS}"
        )));
    }
    let coeffs = PlaneWaveCoefficients::draw(rng, truncation_order(r_max));
    let nx = grid.shape()[0];
    let mut values = vec![0.0; nx * nx];

    // Nodes sharing a radius share their Bessel ladder; the centred square
    // grid has the 8-fold symmetry of the dihedral group when it has a
    // central node.
    let cells = grid.cells_per_side();
    if cells % 2 == 0 {
        let c = (cells / 2) as i64;
        let h = grid.spacing();
        for a in 0..=c {
            for b in 0..=a {
                let r = h * ((a * a + b * b) as f64).sqrt();
                let bessel = bessel_j_integer_orders(r, coeffs.order());
                let mut images = [(a, b), (b, a), (-a, b), (-b, a), (a, -b), (b, -a), (-a, -b), (-b, -a)];
                images.sort_unstable();
                let mut last = None;
                for &(dx, dy) in &images {
                    if last == Some((dx, dy)) {
                        continue;
                    }
                    last = Some((dx, dy));
                    let idx = ((dy + c) as usize) * nx + (dx + c) as usize;
                    let theta = if dx == 0 && dy == 0 { 0.0 } else { (dy as f64).atan2(dx as f64) };
                    values[idx] = coeffs.sum_series(&bessel, theta);
                }
            }
        }
    } else {
        for (idx, v) in values.iter_mut().enumerate() {
            let [x, y] = grid.position(idx);
            *v = coeffs.eval_polar(x.hypot(y), y.atan2(x));
        }
    }

    Ok(FieldSample {
        model: SpectralModel::PlaneWave2D,
        grid: *grid,
        values,
        seed: rng.master_seed,
        index: rng.stream_id,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn centre_value_is_first_draw() {
        let grid = GridSpec::planar(4.0 * PI, 2.0 * PI / 10.0).unwrap();
        let rng = RngStream::new(11, 5);
        let sample = sample_plane_wave(&rng, &grid).unwrap();
        let first = rng.gaussians().next_gaussian();
        let centre = sample.values[10 * 21 + 10];
        assert!((centre - first).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_direct_evaluation_agree() {
        let even = GridSpec::planar(4.0 * PI, 2.0 * PI / 10.0).unwrap();
        let rng = RngStream::new(3, 1);
        let sample = sample_plane_wave(&rng, &even).unwrap();
        let coeffs = PlaneWaveCoefficients::draw(&rng, truncation_order(2.0 * PI * SQRT_2));
        for idx in [0usize, 17, 200, 440] {
            let [x, y] = even.position(idx);
            let direct = coeffs.eval_polar(x.hypot(y), y.atan2(x));
            assert!((sample.values[idx] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_coarse_and_oversized_windows() {
        let rng = RngStream::new(1, 0);
        assert!(sample_plane_wave(&rng, &GridSpec::PlanarWindow { side: 10.0, spacing: 1.0 }).is_err());
        let huge = GridSpec::planar(500.0, 0.5).unwrap();
        assert!(sample_plane_wave(&rng, &huge).is_err());
    }

    #[test]
    fn deterministic() {
        let grid = GridSpec::planar(6.0 * PI, 2.0 * PI / 10.0).unwrap();
        let a = sample_plane_wave(&RngStream::new(9, 2), &grid).unwrap();
        let b = sample_plane_wave(&RngStream::new(9, 2), &grid).unwrap();
        assert_eq!(a.values, b.values);
    }
}
