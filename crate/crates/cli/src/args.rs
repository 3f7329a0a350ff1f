use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nodal_census::engine::EnsembleConfig;
use nodal_census::nodal::AreaEstimator;
use nodal_census::sampler::{GridSpec, SpectralModel};
use nodal_census::Error;

/// Parse a length such as `40pi`, `2pi/10`, `pi/4`, `inf` or `3.5`.
/// `api/b` evaluates as `(a * pi) / b`.
pub fn parse_length(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase();
    if s == "inf" || s == "infinity" {
        return Ok(f64::INFINITY);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let bad = || format!("cannot read length {text:?}; expected forms like 40pi, 2pi/10, pi/4, 3.5 or inf");
    let value = match num.strip_suffix("pi") {
        Some("") => PI,
        Some(coef) => coef.parse::<f64>().map_err(|_| bad())? * PI,
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            value / d
        }
        None => value,
    };
    if value.is_nan() {
        return Err(bad());
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Rpw,
    Band,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Cell,
    Subcell,
}

impl From<Estimator> for AreaEstimator {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Cell => AreaEstimator::CellCount,
            Estimator::Subcell => AreaEstimator::Subcell,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed [default: 7, or the config file's]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Print a JSON summary on stdout instead of text
    #[arg(long)]
    pub json: bool,
}

/// Model and grid. With neither `--model` nor `--config` the desk setup is
/// used: random plane wave, 40pi window, h = 2pi/10.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Ensemble config file (JSON); flags given alongside override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Ensemble to sample
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Window or torus side, e.g. 40pi (required with --model rpw|band)
    #[arg(long, value_parser = parse_length)]
    pub window: Option<f64>,
    /// Grid spacing, e.g. 2pi/10
    #[arg(long, value_parser = parse_length)]
    pub h: Option<f64>,
    /// Inner annulus radius of the band-limited model
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Torus dimension of the band-limited model
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Spherical harmonic degree l
    #[arg(long, short = 'l')]
    pub degree: Option<usize>,
    /// Sphere colatitude rows (default 5l, at least 8)
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Sphere longitude columns (default 2 n_theta)
    #[arg(long)]
    pub n_phi: Option<usize>,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ModelArgs {
    fn model_and_grid(&self) -> Result<(SpectralModel, GridSpec), Error> {
        let Some(kind) = self.model else {
            if self.window.is_some() || self.h.is_some() || self.degree.is_some() {
                return Err(usage("grid flags need --model"));
            }
            return Ok((SpectralModel::PlaneWave2D, GridSpec::planar(40.0 * PI, 2.0 * PI / 10.0)?));
        };
        let h = self.h.unwrap_or(2.0 * PI / 10.0);
        let window = || self.window.ok_or_else(|| usage("--window is required for this model"));
        match kind {
            ModelKind::Rpw => Ok((SpectralModel::PlaneWave2D, GridSpec::planar(window()?, h)?)),
            ModelKind::Band => Ok((
                SpectralModel::BandLimitedTorus { dim: self.dim, alpha: self.alpha },
                GridSpec::torus(window()?, h, self.dim)?,
            )),
            ModelKind::Sphere => {
                let l = self.degree.ok_or_else(|| usage("--degree is required for the sphere model"))?;
                let n_theta = self.n_theta.unwrap_or((5 * l).max(8));
                let n_phi = self.n_phi.unwrap_or(2 * n_theta);
                Ok((SpectralModel::SphericalHarmonic { degree: l }, GridSpec::sphere(n_theta, n_phi)?))
            }
        }
    }

    /// Config from the file or the flags, with `realizations` and seed set.
    pub fn config(&self, common: &Common, realizations: Option<usize>) -> Result<EnsembleConfig, Error> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                let mut c: EnsembleConfig =
                    serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))?;
                if self.model.is_some() {
                    let (model, grid) = self.model_and_grid()?;
                    c.model = model;
                    c.grid = grid;
                }
                c
            }
            None => {
                let (model, grid) = self.model_and_grid()?;
                EnsembleConfig::new(model, grid, 1, common.seed())
            }
        };
        if let Some(seed) = common.seed {
            config.master_seed = seed;
        }
        if let Some(m) = realizations {
            config.realizations = m;
        }
        Ok(config)
    }
}
