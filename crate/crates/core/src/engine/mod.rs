//! Ensemble orchestration.
//!
//! Realization `i` always draws from `RngStream(master_seed, i)`. Workers
//! run realizations independently; their summaries are collected by index
//! and folded in index order, so the report does not depend on scheduling.
//!
//! On disk a run directory holds:
//!
//! ```text
//! manifest.json            version, config hash, config (without output_dir)
//! realizations/00000.csv   domain table
//! realizations/00000.json  {"checksum", "summary"}: what the report folds
//! realizations/00000.ncfs  field values, only with keep_fields
//! report.json
//! ```

mod config;
mod realization;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{fnv1a, Check, EnsembleConfig, SandwichPair};
pub use realization::{draw, run_one, summarize, FkPart, HelmholtzPart, PerturbationPart, RealizationSummary};
pub use report::{
    aggregate, CheckSummaries, CovarianceRow, EnsembleReport, HelmholtzSummary, MeanStderr, NestingSummary,
    PerturbationSummaryRow, PsiPoint, RealizationFailure, SandwichSummary,
};

use crate::error::{Error, Result};
use crate::sampler::write_ncfs;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "NODAL_CENSUS_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: EnsembleConfig,
}

#[derive(Serialize, Deserialize)]
struct StoredSummary {
    checksum: String,
    summary: RealizationSummary,
}

pub fn realization_stem(dir: &Path, index: u64) -> PathBuf {
    dir.join("realizations").join(format!("{index:05}"))
}

fn checksum(csv: &str, summary: &RealizationSummary) -> String {
    let json = serde_json::to_string(summary).expect("summary serializes");
    let mut bytes = csv.as_bytes().to_vec();
    bytes.extend_from_slice(json.as_bytes());
    format!("{:016x}", fnv1a(&bytes))
}

fn write_realization(
    dir: &Path,
    config: &EnsembleConfig,
    dec: &crate::nodal::NodalDecomposition,
    s: &RealizationSummary,
) -> Result<()> {
    let stem = realization_stem(dir, s.index);
    let csv = dec.domain_csv();
    fs::write(stem.with_extension("csv"), &csv)?;
    let stored = StoredSummary { checksum: checksum(&csv, s), summary: s.clone() };
    fs::write(stem.with_extension("json"), serde_json::to_string(&stored)?)?;
    if config.keep_fields {
        write_ncfs(&stem.with_extension("ncfs"), &dec.sample)?;
    }
    Ok(())
}

/// A persisted summary whose checksum matches its table, if there is one.
fn load_realization(dir: &Path, index: u64) -> Option<RealizationSummary> {
    let stem = realization_stem(dir, index);
    let csv = fs::read_to_string(stem.with_extension("csv")).ok()?;
    let stored: StoredSummary = serde_json::from_str(&fs::read_to_string(stem.with_extension("json")).ok()?).ok()?;
    (stored.summary.index == index && stored.checksum == checksum(&csv, &stored.summary)).then_some(stored.summary)
}

fn write_manifest(dir: &Path, config: &EnsembleConfig) -> Result<()> {
    fs::create_dir_all(dir.join("realizations"))?;
    // location-free, so identical runs in different directories match
    let mut echo = config.clone();
    echo.output_dir = None;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: format!("{:016x}", config.hash()),
        config: echo,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format { path, reason: e.to_string() })
}

fn worker_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".into()
    }
}

fn execute(
    config: &EnsembleConfig,
    dir: Option<&Path>,
    mut done: BTreeMap<u64, RealizationSummary>,
    hook: &(dyn Fn(u64) + Sync),
) -> Result<EnsembleReport> {
    let start = Instant::now();
    let todo: Vec<u64> = (0..config.realizations as u64).filter(|i| !done.contains_key(i)).collect();
    let work = || {
        todo.par_iter()
            .map(|&index| {
                let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<RealizationSummary> {
                    hook(index);
                    let (dec, summary) = run_one(config, index)?;
                    if let Some(dir) = dir {
                        write_realization(dir, config, &dec, &summary)?;
                    }
                    Ok(summary)
                }));
                let result = match outcome {
                    Ok(Ok(s)) => Ok(s),
                    Ok(Err(e)) => Err(e.to_string()),
                    Err(payload) => Err(panic_message(payload)),
                };
                (index, result)
            })
            .collect::<Vec<_>>()
    };
    let results = match worker_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    };

    let mut failures = Vec::new();
    for (index, result) in results {
        match result {
            Ok(s) => {
                done.insert(index, s);
            }
            Err(message) => failures.push(RealizationFailure { index, message }),
        }
    }
    failures.sort_by_key(|f| f.index);
    if failures.len() * 10 > config.realizations {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: config.realizations,
            first: format!("realization {}: {}", failures[0].index, failures[0].message),
        });
    }
    let summaries: Vec<RealizationSummary> = done.into_values().collect();
    let mut report = aggregate(config, &summaries, failures)?;
    report.wall_time_s = start.elapsed().as_secs_f64();
    if let Some(dir) = dir {
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

/// Run every realization and aggregate. Writes into `config.output_dir` when
/// it is set. Failed realizations are logged in the report; more than 10%
/// failures abort the run.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleReport> {
    run_ensemble_with_hook(config, &|_| {})
}

/// [`run_ensemble`] with `hook(index)` called at the start of every
/// realization, for fault injection in tests.
#[doc(hidden)]
pub fn run_ensemble_with_hook(config: &EnsembleConfig, hook: &(dyn Fn(u64) + Sync)) -> Result<EnsembleReport> {
    config.validate()?;
    let dir = config.output_dir.as_deref();
    if let Some(dir) = dir {
        write_manifest(dir, config)?;
    }
    execute(config, dir, BTreeMap::new(), hook)
}

/// Finish a run in `partial_dir`: realizations with an intact table are
/// re-used, missing or corrupt ones are recomputed. Refuses a directory whose
/// manifest was written for a different config.
pub fn resume_ensemble(config: &EnsembleConfig, partial_dir: &Path) -> Result<EnsembleReport> {
    resume_ensemble_with_hook(config, partial_dir, &|_| {})
}

#[doc(hidden)]
pub fn resume_ensemble_with_hook(
    config: &EnsembleConfig,
    partial_dir: &Path,
    hook: &(dyn Fn(u64) + Sync),
) -> Result<EnsembleReport> {
    config.validate()?;
    let manifest = read_manifest(partial_dir)?;
    let found = u64::from_str_radix(&manifest.config_hash, 16).map_err(|e| Error::Format {
        path: partial_dir.join("manifest.json"),
        reason: format!("bad config hash: {e}"),
    })?;
    if found != config.hash() {
        return Err(Error::ConfigHashMismatch { expected: config.hash(), found });
    }
    fs::create_dir_all(partial_dir.join("realizations"))?;
    let done =
        (0..config.realizations as u64).filter_map(|i| load_realization(partial_dir, i).map(|s| (i, s))).collect();
    execute(config, Some(partial_dir), done, hook)
}
