//! Random spherical harmonics
//! `f_l = sqrt(4 pi / (2l+1)) sum_{m=-l}^{l} c_m Y_{l,m}` over real
//! L2-orthonormal harmonics. By the addition theorem
//! `sum_m Y_{l,m}(z)^2 = (2l+1) / (4 pi)`, so `E f_l(z)^2 = 1`.

use std::f64::consts::{PI, SQRT_2};

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::model::{validate_pair, GridSpec, SpectralModel};
use super::rng::RngStream;
use super::sample::FieldSample;
use crate::error::Result;

/// Orthonormal associated Legendre values
/// `Q_l^m(x) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x)` for `m = 0..=l`,
/// without the Condon-Shortley phase.
///
/// Sectoral terms come from `Q_m^m = sqrt((2m+1)/(2m)) sin(theta) Q_{m-1}^{m-1}`,
/// then each column is raised to degree `l` by the three-term recurrence in
/// the degree, which stays bounded for all `l` in range.
pub fn normalized_legendre_row(l: usize, cos_theta: f64) -> Vec<f64> {
    let x = cos_theta;
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let mut out = vec![0.0; l + 1];
    let mut sectoral = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=l {
        if m > 0 {
            let mf = m as f64;
            sectoral *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta;
        }
        if m == l {
            out[m] = sectoral;
            continue;
        }
        let mf = m as f64;
        let mut prev = sectoral;
        let mut cur = x * (2.0 * mf + 3.0).sqrt() * sectoral;
        for deg in (m + 2)..=l {
            let d = deg as f64;
            let a = ((4.0 * d * d - 1.0) / (d * d - mf * mf)).sqrt();
            let b = (((d - 1.0).powi(2) - mf * mf) / (4.0 * (d - 1.0).powi(2) - 1.0)).sqrt();
            let next = a * (x * cur - b * prev);
            prev = cur;
            cur = next;
        }
        out[m] = cur;
    }
    out
}

/// Coefficients `c_0, (c_m, c_{-m})` in draw order.
#[derive(Debug, Clone)]
pub struct HarmonicCoefficients {
    pub c0: f64,
    pub pairs: Vec<(f64, f64)>,
}

impl HarmonicCoefficients {
    pub fn draw(rng: &RngStream, degree: usize) -> Self {
        let mut draws = rng.gaussians();
        let c0 = draws.next_gaussian();
        let pairs = (0..degree).map(|_| (draws.next_gaussian(), draws.next_gaussian())).collect();
        Self { c0, pairs }
    }

    pub fn degree(&self) -> usize {
        self.pairs.len()
    }

    /// Direct evaluation at one point.
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let l = self.degree();
        let q = normalized_legendre_row(l, theta.cos());
        let mut acc = self.c0 * q[0];
        for (m, &(c, s)) in self.pairs.iter().enumerate() {
            let mm = (m + 1) as f64;
            acc += SQRT_2 * q[m + 1] * (c * (mm * phi).cos() + s * (mm * phi).sin());
        }
        (4.0 * PI / (2 * l + 1) as f64).sqrt() * acc
    }
}

pub fn sample_spherical_harmonic(rng: &RngStream, degree: usize, grid: &GridSpec) -> Result<FieldSample> {
    let model = SpectralModel::SphericalHarmonic { degree };
    validate_pair(&model, grid)?;
    let (n_theta, n_phi) = match *grid {
        GridSpec::LatLongSphere { n_theta, n_phi } => (n_theta, n_phi),
        _ => unreachable!("validated pair"),
    };
    let coeffs = HarmonicCoefficients::draw(rng, degree);
    let norm = (4.0 * PI / (2 * degree + 1) as f64).sqrt();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n_phi);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut row = vec![Complex64::new(0.0, 0.0); n_phi];
    let mut values = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * PI / n_theta as f64;
        let q = normalized_legendre_row(degree, theta.cos());
        row.fill(Complex64::new(0.0, 0.0));
        row[0] = Complex64::new(norm * coeffs.c0 * q[0], 0.0);
        // degree < n_phi / 2, so m and -m never alias
        for (m, &(c, s)) in coeffs.pairs.iter().enumerate() {
            row[m + 1] = Complex64::new(c, -s) * (norm * SQRT_2 * q[m + 1]);
        }
        fft.process_with_scratch(&mut row, &mut scratch);
        values.extend(row.iter().map(|z| z.re));
    }
    Ok(FieldSample { model, grid: *grid, values, seed: rng.master_seed, index: rng.stream_id })
}
