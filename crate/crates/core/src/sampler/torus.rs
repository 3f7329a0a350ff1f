//! Band-limited fields on the flat torus `[0, L)^n` as finite trigonometric
//! sums over the lattice frequencies `xi_m = 2 pi m / L` in the annulus
//! `alpha <= |xi| <= 1`, evaluated on the grid by an inverse FFT.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::model::{validate_pair, GridSpec, SpectralModel};
use super::rng::RngStream;
use super::sample::FieldSample;
use crate::error::{Error, Result};

/// Torus sides below this many wavelengths are rejected.
pub const MIN_TORUS_WAVELENGTHS: f64 = 20.0;

/// One realization as explicit coefficients.
#[derive(Debug, Clone)]
pub struct BandLimitedRealization {
    /// One representative per `+-m` pair (first non-zero coordinate positive).
    pub frequencies: Vec<Vec<i64>>,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
    /// Coefficient of the constant mode, present when `alpha = 0`.
    pub constant: Option<f64>,
    /// Weight `sqrt(2 / |S|)` of each pair; the constant mode has `sqrt(1 / |S|)`.
    pub pair_weight: f64,
    pub constant_weight: f64,
    pub nodes_per_side: usize,
}

impl BandLimitedRealization {
    /// Direct evaluation at integer lattice coordinates. Phases are reduced
    /// modulo the lattice size in integer arithmetic, so `j` and `j + N e_k`
    /// give bit-identical results.
    pub fn eval_lattice(&self, node: &[i64]) -> f64 {
        let n = self.nodes_per_side as i64;
        let step = 2.0 * PI / n as f64;
        let mut acc = 0.0;
        for ((m, &a), &b) in self.frequencies.iter().zip(&self.cos_coeffs).zip(&self.sin_coeffs) {
            let phase = m.iter().zip(node).map(|(&mi, &ji)| (mi * ji).rem_euclid(n)).sum::<i64>().rem_euclid(n);
            let (s, c) = (phase as f64 * step).sin_cos();
            acc += a * c + b * s;
        }
        self.pair_weight * acc + self.constant.map_or(0.0, |a0| self.constant_weight * a0)
    }
}

/// Lattice frequencies of the annulus (with the shell approximation
/// `[1 - 2pi/L, 1]` when `alpha = 1`), half-set representatives only.
pub fn annulus_frequencies(dim: usize, alpha: f64, side: f64) -> (Vec<Vec<i64>>, bool) {
    let inner = effective_inner_radius(alpha, side);
    let scale = side / (2.0 * PI);
    let lo2 = (inner * scale).powi(2);
    let hi2 = scale * scale;
    let mmax = scale.floor() as i64;
    let mut freqs = Vec::new();
    let mut has_zero = false;
    let mut visit = |m: Vec<i64>| {
        let norm2 = m.iter().map(|&v| (v * v) as f64).sum::<f64>();
        if norm2 < lo2 || norm2 > hi2 {
            return;
        }
        match m.iter().find(|&&v| v != 0) {
            None => has_zero = true,
            Some(&first) if first > 0 => freqs.push(m),
            _ => {}
        }
    };
    match dim {
        2 => {
            for mx in -mmax..=mmax {
                for my in -mmax..=mmax {
                    visit(vec![mx, my]);
                }
            }
        }
        _ => {
            for mx in -mmax..=mmax {
                for my in -mmax..=mmax {
                    for mz in -mmax..=mmax {
                        visit(vec![mx, my, mz]);
                    }
                }
            }
        }
    }
    (freqs, has_zero)
}

fn effective_inner_radius(alpha: f64, side: f64) -> f64 {
    if alpha >= 1.0 {
        1.0 - 2.0 * PI / side
    } else {
        alpha
    }
}

/// Smallest side `>= side` at which the annulus contains a lattice frequency.
fn minimal_side(dim: usize, alpha: f64, side: f64) -> f64 {
    // |m|^2 = q must satisfy 2 pi sqrt(q) <= L <= 2 pi sqrt(q) / alpha.
    let mut best = f64::INFINITY;
    let max_q = 10_000usize;
    for q in 1..=max_q {
        if !is_sum_of_squares(q, dim) {
            continue;
        }
        let low = 2.0 * PI * (q as f64).sqrt();
        let high = if alpha > 0.0 { low / alpha } else { f64::INFINITY };
        if high >= side {
            best = best.min(low.max(side));
            if low >= side {
                break;
            }
        }
    }
    best
}

fn is_sum_of_squares(q: usize, dim: usize) -> bool {
    let r = (q as f64).sqrt() as usize + 1;
    match dim {
        2 => (0..=r).any(|a| {
            a * a <= q && {
                let rest = q - a * a;
                let b = (rest as f64).sqrt().round() as usize;
                b * b == rest
            }
        }),
        _ => (0..=r).any(|a| a * a <= q && is_sum_of_squares(q - a * a, 2)),
    }
}

pub fn band_limited_coefficients(
    rng: &RngStream,
    model: &SpectralModel,
    grid: &GridSpec,
) -> Result<BandLimitedRealization> {
    validate_pair(model, grid)?;
    let (dim, alpha) = match *model {
        SpectralModel::BandLimitedTorus { dim, alpha } => (dim, alpha),
        _ => unreachable!("validated pair"),
    };
    let side = match *grid {
        GridSpec::Torus { side, .. } => side,
        _ => unreachable!("validated pair"),
    };
    let (frequencies, has_zero) = annulus_frequencies(dim, alpha, side);
    let count = 2 * frequencies.len() + usize::from(has_zero);
    if count == 0 {
        return Err(Error::EmptyFrequencySet { min_side: minimal_side(dim, alpha, side) });
    }
    let mut draws = rng.gaussians();
    let constant = has_zero.then(|| draws.next_gaussian());
    let mut cos_coeffs = Vec::with_capacity(frequencies.len());
    let mut sin_coeffs = Vec::with_capacity(frequencies.len());
    for _ in &frequencies {
        cos_coeffs.push(draws.next_gaussian());
        sin_coeffs.push(draws.next_gaussian());
    }
    Ok(BandLimitedRealization {
        frequencies,
        cos_coeffs,
        sin_coeffs,
        constant,
        pair_weight: (2.0 / count as f64).sqrt(),
        constant_weight: (1.0 / count as f64).sqrt(),
        nodes_per_side: grid.cells_per_side(),
    })
}

pub fn sample_band_limited(rng: &RngStream, model: &SpectralModel, grid: &GridSpec) -> Result<FieldSample> {
    let realization = band_limited_coefficients(rng, model, grid)?;
    let n = realization.nodes_per_side;
    let dim = grid.dim();
    let total = n.pow(dim as u32);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); total];
    let flat = |m: &[i64]| -> usize {
        let mut idx = 0usize;
        for &mi in m.iter().rev() {
            idx = idx * n + mi.rem_euclid(n as i64) as usize;
        }
        idx
    };
    for ((m, &a), &b) in realization.frequencies.iter().zip(&realization.cos_coeffs).zip(&realization.sin_coeffs) {
        spectrum[flat(m)] += Complex64::new(a, -b) * realization.pair_weight;
    }
    if let Some(a0) = realization.constant {
        spectrum[0] += Complex64::new(a0 * realization.constant_weight, 0.0);
    }
    inverse_fft_nd(&mut spectrum, n, dim);
    Ok(FieldSample {
        model: *model,
        grid: *grid,
        values: spectrum.iter().map(|z| z.re).collect(),
        seed: rng.master_seed,
        index: rng.stream_id,
    })
}

/// Unnormalized `sum_m c_m exp(+2 pi i m.j / n)` along every axis of an
/// x-fastest cube.
fn inverse_fft_nd(data: &mut [Complex64], n: usize, dim: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow(axis as u32);
        let block = stride * n;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
        }
    }
}
