use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// A scalar or a list in the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a config file, one `key = value` per line.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    pair: Option<OneOrMany<String>>,
    pair_file: Option<PathBuf>,
    rho: Option<OneOrMany<f64>>,
    #[serde(rename = "L")]
    width: Option<OneOrMany<f64>>,
    n: Option<OneOrMany<usize>>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    eigen_tol: Option<f64>,
    outer_tol: Option<f64>,
    max_iter: Option<usize>,
    scale: Option<f64>,
}

/// Flag values; `None` (or empty) falls back to the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub pair: Vec<String>,
    pub pair_file: Option<PathBuf>,
    pub rho: Vec<f64>,
    pub width: Vec<f64>,
    pub n: Vec<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub eigen_tol: Option<f64>,
    pub outer_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pairs: Vec<String>,
    pub pair_file: Option<PathBuf>,
    pub rho: Vec<f64>,
    pub widths: Vec<f64>,
    pub elements: Vec<usize>,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub eigen_tol: f64,
    pub outer_tol: f64,
    /// Outer iterations of the `p ≠ 2` solver.
    pub max_iter: usize,
    pub scale: f64,
}

pub const DEFAULT_OUT: &str = "hardy-out";

fn pick<T>(flag: Vec<T>, file: Option<OneOrMany<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag
    } else {
        file.map(OneOrMany::into_vec).unwrap_or(default)
    }
}

impl RunConfig {
    /// Flags override the file; `default_widths` seeds `L` when neither sets it.
    pub fn resolve(path: Option<&Path>, flags: Overrides, default_widths: &[f64]) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", p.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("config {}: {}", p.display(), e.message())))?
            }
            None => FileConfig::default(),
        };
        let config = RunConfig {
            pairs: pick(flags.pair, file.pair, Vec::new()),
            pair_file: flags.pair_file.or(file.pair_file),
            rho: pick(flags.rho, file.rho, Vec::new()),
            widths: pick(flags.width, file.width, default_widths.to_vec()),
            elements: pick(flags.n, file.n, vec![8192]),
            jobs: flags.jobs.or(file.jobs),
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            eigen_tol: flags.eigen_tol.or(file.eigen_tol).unwrap_or(1e-12),
            outer_tol: flags.outer_tol.or(file.outer_tol).unwrap_or(1e-8),
            max_iter: flags.max_iter.or(file.max_iter).unwrap_or(500),
            scale: flags.scale.or(file.scale).unwrap_or(1.0),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.eigen_tol > 0.0 && self.outer_tol > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        if let Some(n) = self.elements.iter().find(|&&n| n < 8) {
            return Err(CliError::Usage(format!("n = {n} is below the minimum of 8 elements")));
        }
        if self.widths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(CliError::Usage("truncation widths L must be positive".into()));
        }
        if self.rho.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(CliError::Usage("radii must be positive".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(CliError::Usage("weight scale must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("max_iter must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Creates the output directory and checks that it accepts files.
    pub fn prepare_out(&self) -> Result<&Path, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("output directory {}: {e}", self.out.display()));
        std::fs::create_dir_all(&self.out).map_err(io)?;
        let probe = self.out.join(".hardy-write-check");
        std::fs::write(&probe, b"").map_err(io)?;
        std::fs::remove_file(&probe).map_err(io)?;
        Ok(&self.out)
    }
}
