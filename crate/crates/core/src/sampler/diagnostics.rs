//! Statistical and analytic self-checks on sampled fields.

use serde::{Deserialize, Serialize};

use super::model::{GridSpec, SpectralModel};
use super::sample::FieldSample;
use crate::error::{Error, Result};

/// `||Delta_h F + F|| / ||F||` over interior nodes (all nodes on a torus),
/// with the 5-point Laplacian.
pub fn helmholtz_residual(sample: &FieldSample) -> Result<f64> {
    let (periodic, h) = match sample.grid {
        GridSpec::PlanarWindow { spacing, .. } => (false, spacing),
        GridSpec::Torus { spacing, dim: 2, .. } => (true, spacing),
        _ => return Err(Error::Mismatch("helmholtz residual needs a planar or 2-D torus grid".into())),
    };
    let n = sample.grid.shape()[0];
    let v = &sample.values;
    let inv_h2 = 1.0 / (h * h);
    let (mut num, mut den) = (0.0, 0.0);
    let range = if periodic { 0..n } else { 1..n - 1 };
    for j in range.clone() {
        let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
        for i in range.clone() {
            let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
            let c = v[j * n + i];
            let lap = (v[j * n + im] + v[j * n + ip] + v[jm * n + i] + v[jp * n + i] - 4.0 * c) * inv_h2;
            num += (lap + c).powi(2);
            den += c * c;
        }
    }
    if den == 0.0 {
        return Err(Error::Degenerate("field norm is zero, residual undefined".into()));
    }
    Ok((num / den).sqrt())
}

/// `||Delta_S f + l(l+1) f|| / (l(l+1) ||f||)` with the second-order
/// conservative stencil in colatitude, area-weighted, over rows with
/// `sin(theta) >= 1/2`. The polar caps are left out: the `1/sin^2` term
/// makes the stencil error there decay more slowly than `h^2`.
pub fn spherical_laplacian_residual(sample: &FieldSample) -> Result<f64> {
    let (n_theta, n_phi) = match sample.grid {
        GridSpec::LatLongSphere { n_theta, n_phi } => (n_theta, n_phi),
        _ => return Err(Error::Mismatch("spherical residual needs a sphere grid".into())),
    };
    let degree = match sample.model {
        SpectralModel::SphericalHarmonic { degree } => degree,
        _ => return Err(Error::Mismatch("spherical residual needs a spherical harmonic sample".into())),
    };
    let eig = (degree * (degree + 1)) as f64;
    let dt = std::f64::consts::PI / n_theta as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi as f64;
    let v = &sample.values;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..n_theta - 1 {
        let theta = (i as f64 + 0.5) * dt;
        let s = theta.sin();
        if s < 0.5 {
            continue;
        }
        let s_up = (theta - 0.5 * dt).sin();
        let s_dn = (theta + 0.5 * dt).sin();
        for j in 0..n_phi {
            let (jm, jp) = ((j + n_phi - 1) % n_phi, (j + 1) % n_phi);
            let c = v[i * n_phi + j];
            let up = v[(i - 1) * n_phi + j];
            let dn = v[(i + 1) * n_phi + j];
            let d_theta = (s_dn * (dn - c) - s_up * (c - up)) / (s * dt * dt);
            let d_phi = (v[i * n_phi + jm] + v[i * n_phi + jp] - 2.0 * c) / (s * s * dp * dp);
            num += s * (d_theta + d_phi + eig * c).powi(2);
            den += s * c * c;
        }
    }
    if den == 0.0 {
        return Err(Error::Degenerate("field norm is zero, residual undefined".into()));
    }
    Ok((num / den).sqrt() / eig)
}

/// One row of an empirical covariance estimate. `lag` is the lag actually
/// used: the requested lag snapped to a whole number of grid steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub requested_lag: f64,
    pub lag: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Number of probe pairs averaged inside each sample.
pub const COVARIANCE_PROBES: usize = 10;

/// Monte Carlo estimate of `E F(x0) F(x0 + lag e1)`. Each sample contributes
/// the mean product over a fixed probe set; the standard error comes from the
/// scatter of those per-sample means.
pub fn empirical_covariance(samples: &[FieldSample], lags: &[f64]) -> Result<Vec<CovarianceEstimate>> {
    if samples.len() < 2 {
        return Err(Error::Empty("covariance needs at least two samples".into()));
    }
    let first = &samples[0];
    if let Some(bad) = samples.iter().position(|s| !s.same_layout(first)) {
        return Err(Error::Mismatch(format!("sample {bad} differs in model or grid from sample 0")));
    }
    let mut out = Vec::with_capacity(lags.len());
    for &requested in lags {
        let mut lag = 0.0;
        let per_sample = samples
            .iter()
            .map(|s| {
                let (snapped, v) = probe_product(s, requested)?;
                lag = snapped;
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, stderr) = mean_and_stderr(&per_sample);
        out.push(CovarianceEstimate { requested_lag: requested, lag, estimate: mean, stderr });
    }
    Ok(out)
}

/// One sample's mean of `F(x) F(x + lag e1)` over the probe set, with the lag
/// snapped to a whole number of grid steps. Returns `(snapped lag, mean)`.
pub fn probe_product(sample: &FieldSample, lag: f64) -> Result<(f64, f64)> {
    let (periodic, h) = match sample.grid {
        GridSpec::PlanarWindow { spacing, .. } => (false, spacing),
        GridSpec::Torus { spacing, .. } => (true, spacing),
        GridSpec::LatLongSphere { .. } => {
            return Err(Error::Mismatch("covariance probes are defined on flat grids".into()))
        }
    };
    if !(lag.is_finite() && lag >= 0.0) {
        return Err(Error::Domain(format!("lag {lag} must be finite and non-negative")));
    }
    let n = sample.grid.shape()[0];
    let k = (lag / h).round() as usize;
    if !periodic && k + 1 >= n {
        return Err(Error::Geometry(format!("lag {lag} does not fit in the window")));
    }
    let probes = probe_nodes(n, k, periodic);
    let sum: f64 = probes.iter().map(|&(i, j)| sample.values[j * n + i] * sample.values[j * n + (i + k) % n]).sum();
    Ok((k as f64 * h, sum / probes.len() as f64))
}

/// Probe origins spread along a diagonal, far enough apart that their products
/// are nearly uncorrelated.
fn probe_nodes(n: usize, k: usize, periodic: bool) -> Vec<(usize, usize)> {
    let span = if periodic { n } else { n - k };
    (0..COVARIANCE_PROBES)
        .map(|p| {
            let i = (p * span) / COVARIANCE_PROBES + span / (2 * COVARIANCE_PROBES);
            let j = ((p * 3 + 1) * n / (3 * COVARIANCE_PROBES)) % n;
            (i.min(span - 1), j)
        })
        .collect()
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Sample moments of a one-dimensional marginal, with the large-sample
/// standard errors of a Gaussian reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub skewness: f64,
    pub skewness_stderr: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_stderr: f64,
}

pub fn moments(xs: &[f64]) -> Result<Moments> {
    if xs.len() < 4 {
        return Err(Error::Empty("moments need at least four values".into()));
    }
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= m;
    m3 /= m;
    m4 /= m;
    if m2 == 0.0 {
        return Err(Error::Degenerate("constant marginal".into()));
    }
    let variance = m2 * m / (m - 1.0);
    // fourth central moment minus squared variance, over m
    let variance_stderr = ((m4 - m2 * m2) / m).sqrt();
    Ok(Moments {
        count: xs.len(),
        mean,
        variance,
        variance_stderr,
        skewness: m3 / m2.powf(1.5),
        skewness_stderr: (6.0 / m).sqrt(),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        kurtosis_stderr: (24.0 / m).sqrt(),
    })
}

/// Values at one node across an ensemble.
pub fn node_values(samples: &[FieldSample], node: usize) -> Vec<f64> {
    samples.iter().map(|s| s.values[node]).collect()
}
