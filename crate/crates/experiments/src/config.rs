//! Flat `key = value` experiment configuration.
//!
//! A file holds one assignment per line; `#` starts a comment. Lists are
//! comma-separated and grids are written `start:step:stop`. Command-line
//! assignments are applied after the file and replace its values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use regen_mcmc::models::GibbsNormalModel;
use thiserror::Error;

use crate::error::ExperimentError;

/// Upper limit on the number of points a grid may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: key `{key}` assigned twice")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: cannot parse {value:?} ({expected})")]
    Parse {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("`{key}` = {value}: {reason}")]
    Range {
        key: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("cannot read config file {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TwoState,
    Gibbs,
}

impl FromStr for ModelKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "twostate" | "two-state" => Ok(Self::TwoState),
            "gibbs" => Ok(Self::Gibbs),
            _ => Err(()),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TwoState => "twostate",
            Self::Gibbs => "gibbs",
        })
    }
}

/// Where the `(σ²_as, n₀)` inputs of a confidence plan come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Exact,
    DriftTheorem,
    DriftCorollary,
    Uniform,
    UniformReversible,
}

impl FromStr for SourceKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "exact" => Ok(Self::Exact),
            "drift-theorem" => Ok(Self::DriftTheorem),
            "drift-corollary" => Ok(Self::DriftCorollary),
            "uniform" => Ok(Self::Uniform),
            "uniform-reversible" => Ok(Self::UniformReversible),
            _ => Err(()),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::DriftTheorem => "drift-theorem",
            Self::DriftCorollary => "drift-corollary",
            Self::Uniform => "uniform",
            Self::UniformReversible => "uniform-reversible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Fixed(usize),
}

impl FromStr for Threads {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Self::Fixed(n)),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// Arithmetic grid `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl Grid {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self, &'static str> {
        if !(start.is_finite() && step.is_finite() && stop.is_finite()) {
            return Err("grid bounds must be finite");
        }
        if step <= 0.0 {
            return Err("grid step must be positive");
        }
        if stop < start {
            return Err("grid stop precedes start");
        }
        if step <= 1e-12 * start.abs().max(stop.abs()) {
            return Err("grid step is below the resolution of its bounds");
        }
        if (stop - start) / step >= MAX_GRID_POINTS as f64 {
            return Err("grid has too many points");
        }
        Ok(Self { start, step, stop })
    }

    /// Points `start + k·step`, computed by multiplication so that long grids
    /// do not accumulate rounding.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

/// Parses `start:step:stop`.
pub fn parse_grid(s: &str) -> Result<Grid, &'static str> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [start, step, stop] = parts[..] else {
        return Err("expected start:step:stop");
    };
    let num = |x: &str| x.parse::<f64>().map_err(|_| "grid entries must be numbers");
    Grid::new(num(start)?, num(step)?, num(stop)?)
}

/// Parses a nonempty comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, &'static str> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.iter().any(|x| x.is_empty()) {
        return Err("empty list entry");
    }
    items
        .into_iter()
        .map(|x| x.parse::<T>().map_err(|_| "unparseable list entry"))
        .collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Two-state chain parameter.
    pub beta: f64,
    /// Gibbs model degrees of freedom.
    pub t: u32,
    /// Gibbs small-set radius for single-model commands.
    pub a: f64,
    pub t_values: Vec<u32>,
    pub n_values: Vec<u64>,
    pub a_values: Vec<f64>,
    /// Explicit sweep grid; when absent the sweep uses `a_lo + k·a_step`.
    pub a_grid: Option<Grid>,
    pub a_step: f64,
    pub a_max: f64,
    pub replications: u64,
    pub tau2_run_tours: u64,
    /// Tours simulated by the two-state check.
    pub tours: u64,
    pub lorden_n: Vec<u64>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub threads: Threads,
    pub epsilon: f64,
    pub alpha: f64,
    pub source: SourceKind,
    /// Independent repetitions of the confidence procedure in `estimate`.
    pub meta_runs: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Gibbs,
            beta: 0.5,
            t: 50,
            a: 5.0,
            t_values: vec![5, 50, 500],
            n_values: vec![10, 100, 1000],
            a_values: vec![5.0, 100.0],
            a_grid: None,
            a_step: 0.1,
            a_max: 20.0,
            replications: 10_000,
            tau2_run_tours: 1_000_000,
            tours: 100_000,
            lorden_n: vec![10, 50, 200],
            master_seed: 2010,
            output_dir: PathBuf::from("regen-out"),
            threads: Threads::Auto,
            epsilon: 0.3,
            alpha: 0.1,
            source: SourceKind::Exact,
            meta_runs: 0,
        }
    }
}

/// Every accepted key, in the order used when the configuration is written out.
pub const KEYS: &[&str] = &[
    "model",
    "beta",
    "t",
    "a",
    "t_values",
    "n_values",
    "a_values",
    "a_grid",
    "a_step",
    "a_max",
    "replications",
    "tau2_run_tours",
    "tours",
    "lorden_n",
    "master_seed",
    "output_dir",
    "threads",
    "epsilon",
    "alpha",
    "source",
    "meta_runs",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = if key == "seed" { "master_seed" } else { key };
    KEYS.iter().copied().find(|k| *k == key)
}

/// Raw assignments collected from a file and the command line.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, String>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `key = value` lines; a key may appear once per file.
    pub fn load_str(&mut self, text: &str) -> Result<&mut Self, ConfigError> {
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    text: raw.to_string(),
                });
            };
            let key = key.trim();
            let canonical =
                canonical_key(key).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
            if seen.contains(&canonical) {
                return Err(ConfigError::Duplicate {
                    line: idx + 1,
                    key: key.to_string(),
                });
            }
            seen.push(canonical);
            self.values.insert(canonical, value.trim().to_string());
        }
        Ok(self)
    }

    pub fn load_file(&mut self, path: &std::path::Path) -> Result<&mut Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        self.load_str(&text)
    }

    /// Sets one key, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<&mut Self, ConfigError> {
        let canonical =
            canonical_key(key.trim()).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        self.values.insert(canonical, value.into().trim().to_string());
        Ok(self)
    }

    /// Applies a `key=value` assignment.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<&mut Self, ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            text: assignment.to_string(),
        })?;
        self.set(key, value)
    }

    /// Parses the collected values over the defaults and checks ranges.
    pub fn build(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (&key, value) in &self.values {
            apply(&mut cfg, key, value)?;
        }
        cfg.check_ranges()?;
        Ok(cfg)
    }
}

fn parse_err(key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::Parse {
        key: key.to_string(),
        value: value.to_string(),
        expected,
    }
}

fn scalar<T: FromStr>(key: &str, value: &str, expected: &'static str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| parse_err(key, value, expected))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    parse_list(value).map_err(|reason| parse_err(key, value, reason))
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "model" => cfg.model = scalar(key, value, "gibbs or twostate")?,
        "beta" => cfg.beta = scalar(key, value, "a real number")?,
        "t" => cfg.t = scalar(key, value, "a positive integer")?,
        "a" => cfg.a = scalar(key, value, "a real number")?,
        "t_values" => cfg.t_values = list(key, value)?,
        "n_values" => cfg.n_values = list(key, value)?,
        "a_values" => cfg.a_values = list(key, value)?,
        "a_grid" => {
            cfg.a_grid = match value {
                "" | "auto" => None,
                v => Some(parse_grid(v).map_err(|reason| parse_err(key, value, reason))?),
            }
        }
        "a_step" => cfg.a_step = scalar(key, value, "a real number")?,
        "a_max" => cfg.a_max = scalar(key, value, "a real number")?,
        "replications" => cfg.replications = scalar(key, value, "a positive integer")?,
        "tau2_run_tours" => cfg.tau2_run_tours = scalar(key, value, "a positive integer")?,
        "tours" => cfg.tours = scalar(key, value, "a positive integer")?,
        "lorden_n" => cfg.lorden_n = list(key, value)?,
        "master_seed" => cfg.master_seed = scalar(key, value, "an unsigned 64-bit integer")?,
        "output_dir" => {
            if value.is_empty() {
                return Err(parse_err(key, value, "a nonempty path"));
            }
            cfg.output_dir = PathBuf::from(value);
        }
        "threads" => cfg.threads = scalar(key, value, "auto or a positive integer")?,
        "epsilon" => cfg.epsilon = scalar(key, value, "a real number")?,
        "alpha" => cfg.alpha = scalar(key, value, "a real number")?,
        "source" => {
            cfg.source = scalar(
                key,
                value,
                "exact, drift-theorem, drift-corollary, uniform or uniform-reversible",
            )?
        }
        "meta_runs" => cfg.meta_runs = scalar(key, value, "a nonnegative integer")?,
        _ => return Err(ConfigError::UnknownKey(key.to_string())),
    }
    Ok(())
}

fn range(key: &'static str, value: impl fmt::Display, ok: bool, reason: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Range {
            key,
            value: value.to_string(),
            reason,
        })
    }
}

impl ExperimentConfig {
    /// Parses a configuration file's text over the defaults.
    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        ConfigBuilder::new().load_str(text)?.build()
    }

    fn check_ranges(&self) -> Result<(), ConfigError> {
        range("beta", self.beta, self.beta > 0.0 && self.beta <= 0.5, "must lie in (0, 1/2]")?;
        range("a", self.a, self.a.is_finite() && self.a > 0.0, "must be positive")?;
        range("a_step", self.a_step, self.a_step.is_finite() && self.a_step > 0.0, "must be positive")?;
        range("a_max", self.a_max, self.a_max.is_finite(), "must be finite")?;
        range("replications", self.replications, self.replications >= 1, "must be at least 1")?;
        range("tau2_run_tours", self.tau2_run_tours, self.tau2_run_tours >= 2, "must be at least 2")?;
        range("tours", self.tours, self.tours >= 2, "must be at least 2")?;
        range("n_values", join(&self.n_values), self.n_values.iter().all(|&n| n >= 1), "entries must be at least 1")?;
        range("lorden_n", join(&self.lorden_n), self.lorden_n.iter().all(|&n| n >= 1), "entries must be at least 1")?;
        range(
            "a_values",
            join(&self.a_values),
            self.a_values.iter().all(|a| a.is_finite() && *a > 0.0),
            "entries must be positive",
        )?;
        range("epsilon", self.epsilon, self.epsilon.is_finite() && self.epsilon > 0.0, "must be positive")?;
        range("alpha", self.alpha, self.alpha > 0.0 && self.alpha < 0.5, "must lie in (0, 1/2)")?;
        Ok(())
    }

    /// Checks the model constraints of every `(t, a)` pair the configuration
    /// can reach; failures are model-validity errors.
    pub fn validate_models(&self) -> Result<(), ExperimentError> {
        GibbsNormalModel::new(self.t, self.a)?;
        for &a in &self.a_values {
            GibbsNormalModel::new(self.t, a)?;
        }
        for &t in &self.t_values {
            // Any a above the threshold will do; the sweep checks its own grid.
            let tf = f64::from(t);
            let a = if t > 3 { (tf / (tf - 3.0)).sqrt() + 1.0 } else { 1.0 };
            GibbsNormalModel::new(t, a)?;
        }
        Ok(())
    }

    /// `key = value` lines in [`KEYS`] order, omitting the settings that do
    /// not affect results (thread count and output location).
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for &key in KEYS {
            let value = match key {
                "model" => self.model.to_string(),
                "beta" => self.beta.to_string(),
                "t" => self.t.to_string(),
                "a" => self.a.to_string(),
                "t_values" => join(&self.t_values),
                "n_values" => join(&self.n_values),
                "a_values" => join(&self.a_values),
                "a_grid" => self.a_grid.map_or_else(|| "auto".to_string(), |g| g.to_string()),
                "a_step" => self.a_step.to_string(),
                "a_max" => self.a_max.to_string(),
                "replications" => self.replications.to_string(),
                "tau2_run_tours" => self.tau2_run_tours.to_string(),
                "tours" => self.tours.to_string(),
                "lorden_n" => join(&self.lorden_n),
                "master_seed" => self.master_seed.to_string(),
                "epsilon" => self.epsilon.to_string(),
                "alpha" => self.alpha.to_string(),
                "source" => self.source.to_string(),
                "meta_runs" => self.meta_runs.to_string(),
                _ => continue,
            };
            out.push((key, value));
        }
        out
    }
}
