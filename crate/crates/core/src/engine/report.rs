use serde::{Deserialize, Serialize};

use super::config::{Check, EnsembleConfig};
use super::realization::RealizationSummary;
use crate::error::Result;
use crate::sampler::mean_and_stderr;
use crate::specfn::{faber_krahn_floor, CovarianceKernel};
use crate::stats::{EmpiricalCdf, FkReport, FkViolation, NsEstimate, NsRow, SandwichVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFailure {
    pub index: u64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiPoint {
    pub t: f64,
    pub psi_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl MeanStderr {
    fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let (mean, stderr) = mean_and_stderr(xs);
        Some(Self { mean, stderr: if stderr.is_finite() { stderr } else { 0.0 }, count: xs.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSummary {
    pub checked: usize,
    pub held: usize,
    /// `(realization, verdict)` for every check that failed.
    pub failures: Vec<(u64, SandwichVerdict)>,
    /// Largest `upper - lower` seen per `(r, R, t)`.
    pub max_spread: Vec<SandwichVerdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelmholtzSummary {
    pub residual: MeanStderr,
    pub refined_residual: MeanStderr,
    /// Mean residual ratio coarse / fine; about 4 for second-order stencils.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub requested_lag: f64,
    pub lag: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub kernel: f64,
    pub within_3_stderr: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummaryRow {
    pub b: f64,
    /// Mean over realizations of the per-realization median `|dA|`.
    pub median_delta_area: Option<MeanStderr>,
    pub one_to_one_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheckSummaries {
    pub faber_krahn: Option<FkReport>,
    pub sandwich: Option<SandwichSummary>,
    pub helmholtz: Option<HelmholtzSummary>,
    pub covariance: Option<Vec<CovarianceRow>>,
    pub perturbation: Option<Vec<PerturbationSummaryRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingSummary {
    pub realizations: usize,
    pub with_interior_cycles: usize,
}

/// Aggregated ensemble results. Everything except `wall_time_s` is a pure
/// function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub version: String,
    /// Config echo, without output location.
    pub config: EnsembleConfig,
    pub config_hash: String,
    pub realizations: usize,
    pub failures: Vec<RealizationFailure>,
    pub domains: usize,
    pub interior_domains: usize,
    pub psi: Option<EmpiricalCdf>,
    pub psi_at_thresholds: Vec<PsiPoint>,
    pub ns: Option<NsEstimate>,
    pub nodal_length_density: Option<MeanStderr>,
    pub nesting: NestingSummary,
    pub joint: Vec<(f64, f64)>,
    pub checks: CheckSummaries,
    pub wall_time_s: f64,
}

impl EnsembleReport {
    /// Report JSON without timing fields; equal configs give equal bytes.
    pub fn payload_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("wall_time_s");
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Fold summaries given in realization order.
pub fn aggregate(
    config: &EnsembleConfig,
    summaries: &[RealizationSummary],
    failures: Vec<RealizationFailure>,
) -> Result<EnsembleReport> {
    let mut echo = config.clone();
    echo.output_dir = None;
    echo.keep_fields = false;

    let areas: Vec<f64> = summaries.iter().flat_map(|s| s.psi_areas.iter().copied()).collect();
    let psi = if areas.is_empty() { None } else { Some(EmpiricalCdf::from_observations(&areas)?) };
    let psi_at_thresholds = match &psi {
        Some(cdf) => cdf
            .sample_at(&config.thresholds)
            .into_iter()
            .map(|(t, psi_hat, stderr)| PsiPoint { t, psi_hat, stderr })
            .collect(),
        None => Vec::new(),
    };

    let ns = (!config.radii.is_empty() && !summaries.is_empty()).then(|| {
        let rows: Vec<NsRow> = config
            .radii
            .iter()
            .enumerate()
            .map(|(k, &radius)| {
                let ball = std::f64::consts::PI * radius * radius;
                let ratios: Vec<f64> = summaries.iter().map(|s| s.ns_counts[k] as f64 / ball).collect();
                let m = MeanStderr::of(&ratios).expect("non-empty");
                NsRow { radius, mean: m.mean, stderr: m.stderr }
            })
            .collect();
        let largest = *rows.iter().max_by(|a, b| a.radius.total_cmp(&b.radius)).expect("non-empty");
        NsEstimate { c_hat: largest.mean, stderr: largest.stderr, rows }
    });

    let densities: Vec<f64> = summaries.iter().filter_map(|s| s.nodal_length_density).collect();

    let mut checks = CheckSummaries::default();
    if config.has(Check::FaberKrahn) {
        let floor = faber_krahn_floor(2)?;
        let mut min_area = f64::INFINITY;
        let mut violations = Vec::new();
        for s in summaries {
            let part = s.faber_krahn.as_ref().expect("check enabled");
            min_area = part.min_area.map_or(min_area, |a| a.min(min_area));
            violations.extend(part.violations.iter().map(|&(label, area)| FkViolation {
                seed: config.master_seed,
                index: s.index,
                label,
                area,
            }));
        }
        checks.faber_krahn = Some(FkReport {
            floor,
            margin: config.fk_margin,
            threshold: (1.0 - config.fk_margin) * floor,
            min_area,
            interior_domains: summaries.iter().map(|s| s.interior_count).sum(),
            violations,
        });
    }
    if config.has(Check::Sandwich) {
        let all = summaries.iter().flat_map(|s| s.sandwich.iter().map(move |v| (s.index, *v)));
        let mut max_spread: Vec<SandwichVerdict> = Vec::new();
        for (_, v) in all.clone() {
            match max_spread.iter_mut().find(|m| m.r == v.r && m.big_r == v.big_r && m.t == v.t) {
                Some(m) if v.spread() > m.spread() => *m = v,
                Some(_) => {}
                None => max_spread.push(v),
            }
        }
        checks.sandwich = Some(SandwichSummary {
            checked: all.clone().count(),
            held: all.clone().filter(|(_, v)| v.holds).count(),
            failures: all.filter(|(_, v)| !v.holds).collect(),
            max_spread,
        });
    }
    if config.has(Check::Helmholtz) && !summaries.is_empty() {
        let parts: Vec<_> = summaries.iter().map(|s| s.helmholtz.expect("check enabled")).collect();
        let coarse: Vec<f64> = parts.iter().map(|p| p.residual).collect();
        let fine: Vec<f64> = parts.iter().map(|p| p.refined_residual).collect();
        let ratios: Vec<f64> = parts.iter().map(|p| p.residual / p.refined_residual).collect();
        checks.helmholtz = Some(HelmholtzSummary {
            residual: MeanStderr::of(&coarse).expect("non-empty"),
            refined_residual: MeanStderr::of(&fine).expect("non-empty"),
            ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
        });
    }
    if config.has(Check::Covariance) && !summaries.is_empty() {
        let kernel = config.model.kernel()?;
        checks.covariance = Some(
            config
                .covariance_lags
                .iter()
                .enumerate()
                .map(|(k, &requested_lag)| covariance_row(&kernel, requested_lag, summaries, k))
                .collect::<Result<_>>()?,
        );
    }
    if config.has(Check::Perturbation) && !summaries.is_empty() {
        checks.perturbation = Some(
            config
                .perturbation_b
                .iter()
                .enumerate()
                .map(|(k, &b)| {
                    let medians: Vec<f64> =
                        summaries.iter().filter_map(|s| s.perturbation[k].median_delta_area).collect();
                    let fractions: Vec<f64> = summaries.iter().map(|s| s.perturbation[k].one_to_one_fraction).collect();
                    PerturbationSummaryRow {
                        b,
                        median_delta_area: MeanStderr::of(&medians),
                        one_to_one_fraction: fractions.iter().sum::<f64>() / fractions.len() as f64,
                    }
                })
                .collect(),
        );
    }

    Ok(EnsembleReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: format!("{:016x}", config.hash()),
        config: echo,
        realizations: summaries.len(),
        failures,
        domains: summaries.iter().map(|s| s.domain_count).sum(),
        interior_domains: summaries.iter().map(|s| s.interior_count).sum(),
        psi,
        psi_at_thresholds,
        ns,
        nodal_length_density: MeanStderr::of(&densities),
        nesting: NestingSummary {
            realizations: summaries.len(),
            with_interior_cycles: summaries.iter().filter(|s| !s.nesting_acyclic).count(),
        },
        joint: summaries.iter().flat_map(|s| s.joint.iter().copied()).collect(),
        checks,
        wall_time_s: 0.0,
    })
}

fn covariance_row(
    kernel: &CovarianceKernel,
    requested_lag: f64,
    summaries: &[RealizationSummary],
    k: usize,
) -> Result<CovarianceRow> {
    let lag = summaries[0].covariance[k].0;
    let products: Vec<f64> = summaries.iter().map(|s| s.covariance[k].1).collect();
    let m = MeanStderr::of(&products).expect("non-empty");
    let expected = kernel.eval(lag)?;
    Ok(CovarianceRow {
        requested_lag,
        lag,
        estimate: m.mean,
        stderr: m.stderr,
        kernel: expected,
        within_3_stderr: (m.mean - expected).abs() <= 3.0 * m.stderr,
    })
}
