use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous empirical distribution function with breakpoints at the
/// observed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    /// Binomial standard error `sqrt(p (1 - p) / n)` at each breakpoint,
    /// treating observations as independent.
    pub stderr: Vec<f64>,
    pub total_count: usize,
}

impl EmpiricalCdf {
    pub fn from_observations(observations: &[f64]) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Empty("no observations for the empirical distribution".into()));
        }
        if let Some(bad) = observations.iter().find(|v| v.is_nan()) {
            return Err(Error::Domain(format!("observation {bad} is not a number")));
        }
        let mut sorted = observations.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for (k, &v) in sorted.iter().enumerate() {
            if k + 1 < n && sorted[k + 1] == v {
                continue;
            }
            breakpoints.push(v);
            values.push((k + 1) as f64 / n as f64);
        }
        let stderr = values.iter().map(|&p| (p * (1.0 - p) / n as f64).sqrt()).collect();
        Ok(Self { breakpoints, values, stderr, total_count: n })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= t);
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    pub fn max_breakpoint(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty by construction")
    }

    pub fn is_monotone(&self) -> bool {
        self.breakpoints.windows(2).all(|w| w[0] < w[1]) && self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Largest single jump and where it happens.
    pub fn largest_jump(&self) -> (f64, f64) {
        let mut prev = 0.0;
        let mut best = (0.0, f64::NAN);
        for (&t, &v) in self.breakpoints.iter().zip(&self.values) {
            if v - prev > best.0 {
                best = (v - prev, t);
            }
            prev = v;
        }
        best
    }

    /// Values on a caller-supplied grid of `t`, for binned export.
    pub fn sample_at(&self, ts: &[f64]) -> Vec<(f64, f64, f64)> {
        let n = self.total_count as f64;
        ts.iter()
            .map(|&t| {
                let p = self.eval(t);
                (t, p, (p * (1.0 - p) / n).sqrt())
            })
            .collect()
    }
}

/// `sup_t |A(t) - B(t)|` over the merged breakpoints.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> Result<f64> {
    if a.breakpoints.is_empty() || b.breakpoints.is_empty() {
        return Err(Error::Empty("KS distance needs two non-empty distributions".into()));
    }
    let sup = a.breakpoints.iter().chain(&b.breakpoints).map(|&t| (a.eval(t) - b.eval(t)).abs()).fold(0.0, f64::max);
    Ok(sup)
}
