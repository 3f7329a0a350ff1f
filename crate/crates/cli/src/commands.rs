use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use nodal_census::engine::{draw, resume_ensemble, run_ensemble, Check, EnsembleConfig, EnsembleReport, SandwichPair};
use nodal_census::nodal::decompose;
use nodal_census::sampler::{read_ncfs, write_ncfs, GridSpec, SpectralModel};
use nodal_census::stats::{export, ks_distance, sandwich_check, EmpiricalCdf};
use nodal_census::Error;
use serde_json::{json, Value};

use crate::args::{parse_length, Common, Estimator, ModelArgs};
use crate::svg::step_plot;

type Outcome = Result<Value, Error>;

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Flag value if given; otherwise the default, unless a config file supplies it.
fn pick<T>(flag: Option<T>, model: &ModelArgs, default: T) -> Option<T> {
    flag.or(if model.config.is_some() { None } else { Some(default) })
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<String, Error> {
    fs::write(&path, contents)?;
    Ok(path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// CSV tables and SVG plots
    Full,
    /// CSV tables only
    CsvOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    FaberKrahn,
    Sandwich,
    Helmholtz,
    Covariance,
    Perturbation,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::FaberKrahn => Check::FaberKrahn,
            CheckArg::Sandwich => Check::Sandwich,
            CheckArg::Helmholtz => Check::Helmholtz,
            CheckArg::Covariance => Check::Covariance,
            CheckArg::Perturbation => Check::Perturbation,
        }
    }
}

/// One `r:R` pair, e.g. `5:15`.
pub fn parse_pair(text: &str) -> Result<SandwichPair, String> {
    let (r, big_r) = text.split_once(':').ok_or_else(|| format!("expected r:R, got {text:?}"))?;
    Ok(SandwichPair { r: parse_length(r)?, big_r: parse_length(big_r)? })
}

/// Ensemble size, estimators and run-directory handling.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Number of realizations [default: 100, or the config file's]
    #[arg(long = "M", value_name = "M")]
    pub m: Option<usize>,
    /// Area estimator for the volume distribution [default: subcell]
    #[arg(long, value_enum)]
    pub estimator: Option<Estimator>,
    /// Also store every field as NCFS under <out>/realizations
    #[arg(long)]
    pub keep_fields: bool,
    /// Finish an interrupted run in <out>, reusing intact realizations
    #[arg(long)]
    pub resume: bool,
}

impl RunArgs {
    fn apply(&self, config: &mut EnsembleConfig, model: &ModelArgs, common: &Common) {
        if let Some(e) = pick(self.estimator, model, Estimator::Subcell) {
            config.area_estimator = e.into();
        }
        config.keep_fields |= self.keep_fields;
        config.output_dir = Some(common.out.clone());
    }

    fn realizations(&self, model: &ModelArgs) -> Option<usize> {
        pick(self.m, model, 100)
    }

    fn run(&self, config: &EnsembleConfig) -> Result<EnsembleReport, Error> {
        config.validate()?;
        let dir = config.output_dir.as_deref().expect("run directory set");
        if self.resume {
            resume_ensemble(config, dir)
        } else {
            run_ensemble(config)
        }
    }
}

fn run_summary(command: &str, report: &EnsembleReport, files: Vec<String>) -> Value {
    json!({
        "command": command,
        "config_hash": report.config_hash,
        "realizations": report.realizations,
        "failures": report.failures.len(),
        "domains": report.domains,
        "interior_domains": report.interior_domains,
        "files": files,
    })
}

/// Volume distribution table: every breakpoint plus the requested thresholds.
fn psi_table(cdf: &EmpiricalCdf, thresholds: &[f64]) -> String {
    let mut ts: Vec<f64> = cdf.breakpoints.iter().chain(thresholds).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    export::psi_csv_binned(cdf, &ts)
}

fn psi_outputs(out: &Path, report: &EnsembleReport, format: Format, files: &mut Vec<String>) -> Result<(), Error> {
    let Some(cdf) = &report.psi else { return Ok(()) };
    files.push(write(out.join("psi.csv"), psi_table(cdf, &report.config.thresholds))?);
    if format == Format::Full {
        files.push(write(out.join("psi.svg"), step_plot("empirical volume distribution", &[("psi_hat", cdf)]))?);
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Realization index within the seed's stream family
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

pub fn sample(a: &SampleArgs) -> Outcome {
    let config = a.model.config(&a.common, None)?;
    config.validate()?;
    let field = draw(&config, a.index)?;
    fs::create_dir_all(&a.common.out)?;
    let path = a.common.out.join("sample.ncfs");
    let sidecar = write_ncfs(&path, &field)?;
    Ok(json!({
        "command": "sample",
        "seed": field.seed,
        "index": field.index,
        "shape": field.grid.shape(),
        "files": [path.display().to_string(), sidecar.display().to_string()],
    }))
}

#[derive(Debug, Args)]
pub struct NodalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Saved NCFS sample to decompose instead of drawing one
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Realization index when drawing
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

pub fn nodal(a: &NodalArgs) -> Outcome {
    let field = match &a.input {
        Some(path) => {
            if a.model.config.is_some() || a.model.model.is_some() || a.common.seed.is_some() {
                return Err(usage("--in takes the field from the file; drop the model, config and seed flags"));
            }
            read_ncfs(path)?
        }
        None => {
            let config = a.model.config(&a.common, None)?;
            config.validate()?;
            draw(&config, a.index)?
        }
    };
    let dec = decompose(&field);
    fs::create_dir_all(&a.common.out)?;
    let path = write(a.common.out.join("domains.csv"), dec.domain_csv())?;
    Ok(json!({
        "command": "nodal",
        "domains": dec.domain_count(),
        "interior_domains": dec.interior().count(),
        "files": [path],
    }))
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Thresholds tabulated in psi.csv and the report [default: 17,19,20,50]
    #[arg(long, value_delimiter = ',', value_parser = parse_length)]
    pub thresholds: Option<Vec<f64>>,
    /// Only domains inside this centred ball enter the distribution
    #[arg(long, value_parser = parse_length)]
    pub psi_radius: Option<f64>,
    #[arg(long, value_enum, default_value = "full")]
    pub format: Format,
}

pub fn psi(a: &PsiArgs) -> Outcome {
    let mut config = a.model.config(&a.common, a.run.realizations(&a.model))?;
    a.run.apply(&mut config, &a.model, &a.common);
    if let Some(t) = pick(a.thresholds.clone(), &a.model, vec![17.0, 19.0, 20.0, 50.0]) {
        config.thresholds = t;
    }
    if a.psi_radius.is_some() {
        config.psi_radius = a.psi_radius;
    }
    let report = a.run.run(&config)?;
    let mut files = vec![a.common.out.join("report.json").display().to_string()];
    psi_outputs(&a.common.out, &report, a.format, &mut files)?;
    let mut summary = run_summary("psi", &report, files);
    summary["psi_at_thresholds"] = json!(report.psi_at_thresholds);
    Ok(summary)
}

#[derive(Debug, Args)]
pub struct NsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Ball radii [default: 10,15,20]
    #[arg(long, value_delimiter = ',', value_parser = parse_length)]
    pub radii: Option<Vec<f64>>,
}

pub fn ns(a: &NsArgs) -> Outcome {
    let mut config = a.model.config(&a.common, a.run.realizations(&a.model))?;
    a.run.apply(&mut config, &a.model, &a.common);
    if let Some(r) = pick(a.radii.clone(), &a.model, vec![10.0, 15.0, 20.0]) {
        config.radii = r;
    }
    if config.radii.is_empty() {
        return Err(usage("ns needs at least one radius"));
    }
    let report = a.run.run(&config)?;
    let ns = report.ns.as_ref().ok_or_else(|| Error::Empty("no density estimate".into()))?;
    let files = vec![
        a.common.out.join("report.json").display().to_string(),
        write(a.common.out.join("ns.csv"), export::ns_csv(ns))?,
    ];
    let mut summary = run_summary("ns", &report, files);
    summary["ns"] = json!(ns);
    Ok(summary)
}

#[derive(Debug, Args)]
pub struct SandwichArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of realizations checked [default: 1]
    #[arg(long = "M", value_name = "M")]
    pub m: Option<usize>,
    /// Area estimator for the thresholds [default: subcell]
    #[arg(long, value_enum)]
    pub estimator: Option<Estimator>,
    /// Inner radius
    #[arg(long, value_parser = parse_length)]
    pub r: f64,
    /// Outer radius
    #[arg(long = "R", value_name = "R", value_parser = parse_length)]
    pub big_r: f64,
    /// Area thresholds; `inf` counts every domain
    #[arg(long, value_delimiter = ',', value_parser = parse_length, default_value = "inf")]
    pub t: Vec<f64>,
}

pub fn sandwich(a: &SandwichArgs) -> Outcome {
    let mut config = a.model.config(&a.common, pick(a.m, &a.model, 1))?;
    if let Some(e) = pick(a.estimator, &a.model, Estimator::Subcell) {
        config.area_estimator = e.into();
    }
    config.checks.insert(Check::Sandwich);
    config.sandwich = vec![SandwichPair { r: a.r, big_r: a.big_r }];
    config.validate()?;
    let mut rows = Vec::new();
    for index in 0..config.realizations as u64 {
        let dec = decompose(&draw(&config, index)?);
        for &t in &a.t {
            rows.push(sandwich_check(&dec, a.r, a.big_r, t, config.area_estimator)?);
        }
    }
    fs::create_dir_all(&a.common.out)?;
    let path = write(a.common.out.join("sandwich.csv"), export::sandwich_csv(&rows))?;
    let held = rows.iter().filter(|v| v.holds).count();
    Ok(json!({
        "command": "sandwich",
        "checked": rows.len(),
        "held": held,
        "rows": rows,
        "files": [path],
    }))
}

#[derive(Debug, Args)]
pub struct FaberKrahnArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Relative margin below the area floor before a domain counts as a violation
    #[arg(long)]
    pub margin: Option<f64>,
    /// Area estimator for the floor comparison [default: cell]
    #[arg(long, value_enum)]
    pub fk_estimator: Option<Estimator>,
}

pub fn faber_krahn(a: &FaberKrahnArgs) -> Outcome {
    let mut config = a.model.config(&a.common, a.run.realizations(&a.model))?;
    a.run.apply(&mut config, &a.model, &a.common);
    config.checks.insert(Check::FaberKrahn);
    if let Some(m) = a.margin {
        config.fk_margin = m;
    }
    if let Some(e) = pick(a.fk_estimator, &a.model, Estimator::Cell) {
        config.fk_estimator = e.into();
    }
    let report = a.run.run(&config)?;
    let fk = report.checks.faber_krahn.as_ref().ok_or_else(|| Error::Empty("no interior domains".into()))?;
    let files = vec![
        a.common.out.join("report.json").display().to_string(),
        write(a.common.out.join("faber_krahn.json"), serde_json::to_string_pretty(fk)?)?,
    ];
    let mut summary = run_summary("faber-krahn", &report, files);
    summary["violations"] = json!(fk.violations.len());
    summary["min_area"] = json!(fk.min_area);
    summary["threshold"] = json!(fk.threshold);
    Ok(summary)
}

#[derive(Debug, Args)]
pub struct SphereCompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Spherical harmonic degree l
    #[arg(long, short = 'l', default_value_t = 80)]
    pub degree: usize,
    /// Colatitude rows (default 5l, at least 8)
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Longitude columns (default 2 n_theta)
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Number of sphere realizations
    #[arg(long = "M", value_name = "M", default_value_t = 50)]
    pub m: usize,
    /// Area estimator [default: the planar report's]
    #[arg(long, value_enum)]
    pub estimator: Option<Estimator>,
    /// report.json of a planar run
    #[arg(long, value_name = "REPORT")]
    pub planar: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    pub format: Format,
}

pub fn sphere_compare(a: &SphereCompareArgs) -> Outcome {
    let n_theta = a.n_theta.unwrap_or((5 * a.degree).max(8));
    let grid = GridSpec::sphere(n_theta, a.n_phi.unwrap_or(2 * n_theta))?;
    let mut config =
        EnsembleConfig::new(SpectralModel::SphericalHarmonic { degree: a.degree }, grid, a.m, a.common.seed());
    config.validate()?;

    let text = fs::read_to_string(&a.planar)
        .map_err(|e| usage(format!("cannot read planar report {}: {e}", a.planar.display())))?;
    let planar: EnsembleReport =
        serde_json::from_str(&text).map_err(|e| Error::Format { path: a.planar.clone(), reason: e.to_string() })?;
    let planar_cdf = planar.psi.as_ref().ok_or_else(|| usage("the planar report has no volume distribution"))?;
    let recomputed = format!("{:016x}", planar.config.hash());
    let hash_ok = recomputed == planar.config_hash;
    if !hash_ok {
        eprintln!(
            "warning: planar report hash {} does not match its config ({recomputed}); comparing anyway",
            planar.config_hash
        );
    }
    config.area_estimator = a.estimator.map_or(planar.config.area_estimator, Into::into);

    let report = run_ensemble(&config)?;
    let sphere_cdf = report.psi.as_ref().ok_or_else(|| Error::Empty("no sphere domains".into()))?;
    let ks = ks_distance(sphere_cdf, planar_cdf)?;

    let out = &a.common.out;
    fs::create_dir_all(out)?;
    let summary = json!({
        "command": "sphere-compare",
        "degree": a.degree,
        "realizations": report.realizations,
        "failures": report.failures.len(),
        "sphere_config_hash": report.config_hash,
        "planar_config_hash": planar.config_hash,
        "planar_hash_matches": hash_ok,
        "ks_distance": ks,
        "sphere_breakpoints": sphere_cdf.breakpoints.len(),
        "planar_breakpoints": planar_cdf.breakpoints.len(),
        "sphere_domains": sphere_cdf.total_count,
        "planar_domains": planar_cdf.total_count,
    });
    let mut files = vec![
        write(out.join("sphere_compare.json"), serde_json::to_string_pretty(&summary)?)?,
        write(out.join("sphere_psi.csv"), export::psi_csv(sphere_cdf))?,
        write(out.join("planar_psi.csv"), export::psi_csv(planar_cdf))?,
    ];
    if a.format == Format::Full {
        let svg = step_plot("sphere against plane", &[("sphere", sphere_cdf), ("plane", planar_cdf)]);
        files.push(write(out.join("sphere_compare.svg"), svg)?);
    }
    let mut summary = summary;
    summary["files"] = json!(files);
    Ok(summary)
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Volume distribution thresholds [default: 17,19,20,50]
    #[arg(long, value_delimiter = ',', value_parser = parse_length)]
    pub thresholds: Option<Vec<f64>>,
    /// Ball radii for the domain density [default: 10,15,20 on flat grids]
    #[arg(long, value_delimiter = ',', value_parser = parse_length)]
    pub radii: Option<Vec<f64>>,
    /// Checks to run [default: every check the geometry supports]
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Option<Vec<CheckArg>>,
    /// Sandwich pairs r:R [default: 5:15,8:20]
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub sandwich: Option<Vec<SandwichPair>>,
    /// Faber-Krahn margin
    #[arg(long)]
    pub margin: Option<f64>,
    /// Area estimator for the Faber-Krahn check [default: cell]
    #[arg(long, value_enum)]
    pub fk_estimator: Option<Estimator>,
    /// Only domains inside this centred ball enter the volume distribution
    #[arg(long, value_parser = parse_length)]
    pub psi_radius: Option<f64>,
    #[arg(long, value_enum, default_value = "full")]
    pub format: Format,
}

fn supported_checks(grid: &GridSpec) -> Vec<Check> {
    match grid {
        GridSpec::PlanarWindow { .. } => Check::ALL.to_vec(),
        GridSpec::Torus { dim: 2, .. } => {
            vec![Check::FaberKrahn, Check::Helmholtz, Check::Covariance, Check::Perturbation]
        }
        GridSpec::LatLongSphere { .. } => vec![Check::FaberKrahn, Check::Helmholtz, Check::Perturbation],
        GridSpec::Torus { .. } => vec![Check::FaberKrahn],
    }
}

pub fn report(a: &ReportArgs) -> Outcome {
    let mut config = a.model.config(&a.common, a.run.realizations(&a.model))?;
    a.run.apply(&mut config, &a.model, &a.common);
    let flat = matches!(config.grid, GridSpec::PlanarWindow { .. } | GridSpec::Torus { dim: 2, .. });
    if let Some(t) = pick(a.thresholds.clone(), &a.model, vec![17.0, 19.0, 20.0, 50.0]) {
        config.thresholds = t;
    }
    if let Some(r) = pick(a.radii.clone(), &a.model, if flat { vec![10.0, 15.0, 20.0] } else { vec![] }) {
        config.radii = r;
    }
    let checks = match &a.checks {
        Some(list) => Some(list.iter().map(|&c| c.into()).collect()),
        None => pick(None, &a.model, supported_checks(&config.grid)),
    };
    if let Some(checks) = checks {
        config.checks = checks.into_iter().collect();
    }
    let planar = matches!(config.grid, GridSpec::PlanarWindow { .. });
    if let Some(p) = pick(
        a.sandwich.clone(),
        &a.model,
        if planar { vec![SandwichPair { r: 5.0, big_r: 15.0 }, SandwichPair { r: 8.0, big_r: 20.0 }] } else { vec![] },
    ) {
        config.sandwich = p;
    }
    if let Some(m) = a.margin {
        config.fk_margin = m;
    }
    if let Some(e) = pick(a.fk_estimator, &a.model, Estimator::Cell) {
        config.fk_estimator = e.into();
    }
    if a.psi_radius.is_some() {
        config.psi_radius = a.psi_radius;
    }
    let report = a.run.run(&config)?;
    let out = &a.common.out;
    let mut files = vec![out.join("report.json").display().to_string()];
    psi_outputs(out, &report, a.format, &mut files)?;
    if let Some(ns) = &report.ns {
        files.push(write(out.join("ns.csv"), export::ns_csv(ns))?);
    }
    files.push(write(out.join("joint.csv"), export::joint_csv(&report.joint))?);
    let mut summary = run_summary("report", &report, files);
    summary["psi_at_thresholds"] = json!(report.psi_at_thresholds);
    summary["checks"] = json!(report.checks);
    Ok(summary)
}
