use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{decompose, NodalDecomposition};
use crate::error::{Error, Result};
use crate::sampler::FieldSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    pub label: u32,
    pub matched_label: u32,
    /// The matched domain's own best match is this domain.
    pub one_to_one: bool,
    pub delta_area: f64,
    pub perimeter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub b: f64,
    pub rows: Vec<PerturbationRow>,
    /// Share of interior domains matched one-to-one.
    pub one_to_one_fraction: f64,
    /// Least-squares `C` in `|dA| ~ C * perimeter * b` over one-to-one matches;
    /// `None` when `b = 0` or nothing matched.
    pub fitted_c: Option<f64>,
}

impl PerturbationReport {
    /// Median `|dA|` over one-to-one matched domains.
    pub fn median_delta_area(&self) -> Option<f64> {
        let mut d: Vec<f64> = self.rows.iter().filter(|r| r.one_to_one).map(|r| r.delta_area).collect();
        if d.is_empty() {
            return None;
        }
        d.sort_by(f64::total_cmp);
        let m = d.len();
        Some(if m % 2 == 1 { d[m / 2] } else { 0.5 * (d[m / 2 - 1] + d[m / 2]) })
    }
}

/// Decompose `F` and `F + b G`, match each interior domain of `F` to the
/// domain of the perturbed field it overlaps most (ties to the smaller
/// label), and report the change in marching-squares area.
pub fn perturbation_stability(sample: &FieldSample, direction: &FieldSample, b: f64) -> Result<PerturbationReport> {
    if sample.grid != direction.grid {
        return Err(Error::Mismatch("perturbation direction lives on a different grid".into()));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::Domain(format!("perturbation size {b} must be finite and non-negative")));
    }
    let base = decompose(sample);
    let mut moved = sample.clone();
    for (v, g) in moved.values.iter_mut().zip(&direction.values) {
        *v += b * g;
    }
    let pert = decompose(&moved);
    Ok(match_domains(&base, &pert, b))
}

fn best_matches(from: &[u32], to: &[u32], n_from: usize) -> Vec<u32> {
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    for (&a, &b) in from.iter().zip(to) {
        *overlap.entry((a, b)).or_insert(0) += 1;
    }
    let mut best = vec![(0usize, u32::MAX); n_from];
    for (&(a, b), &count) in &overlap {
        let slot = &mut best[a as usize];
        if count > slot.0 || (count == slot.0 && b < slot.1) {
            *slot = (count, b);
        }
    }
    best.into_iter().map(|(_, b)| b).collect()
}

fn match_domains(base: &NodalDecomposition, pert: &NodalDecomposition, b: f64) -> PerturbationReport {
    let forward = best_matches(&base.labels, &pert.labels, base.domains.len());
    let backward = best_matches(&pert.labels, &base.labels, pert.domains.len());
    let mut rows = Vec::new();
    for d in base.interior() {
        let m = forward[d.label as usize];
        let matched = &pert.domains[m as usize];
        rows.push(PerturbationRow {
            label: d.label,
            matched_label: m,
            one_to_one: backward[m as usize] == d.label && matched.sign == d.sign,
            delta_area: (matched.subcell_area - d.subcell_area).abs(),
            perimeter: d.perimeter,
        });
    }
    let matched: Vec<&PerturbationRow> = rows.iter().filter(|r| r.one_to_one).collect();
    let one_to_one_fraction = if rows.is_empty() { 0.0 } else { matched.len() as f64 / rows.len() as f64 };
    let (num, den) = matched
        .iter()
        .fold((0.0, 0.0), |(n, d), r| (n + r.perimeter * b * r.delta_area, d + (r.perimeter * b).powi(2)));
    let fitted_c = (den > 0.0).then(|| num / den);
    PerturbationReport { b, rows, one_to_one_fraction, fitted_c }
}
