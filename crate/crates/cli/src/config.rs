//! Run configuration: defaults, overridden by a `key = value` config file,
//! overridden in turn by command-line flags.

use std::path::{Path, PathBuf};

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub truncation: u64,
    pub degree: usize,
    /// Tolerance override; each subcommand supplies its own default
    /// (solvers 1e-9, dimq 1e-3).
    pub tol: Option<f64>,
    pub grid: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub precision_bits: Option<u32>,
    pub beta: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: 10_000,
            degree: 16,
            tol: None,
            grid: None,
            out: None,
            precision_bits: None,
            beta: 1.0,
        }
    }
}

impl RunConfig {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// `start:stop:count` grid specification, inclusive of both ends.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid {text:?} is not of the form start:stop:count"));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad grid start {:?}", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| format!("bad grid stop {:?}", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad grid count {:?}", parts[2]))?;
        if count < 2 {
            return Err("grid count must be >= 2".to_string());
        }
        Ok(GridSpec { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

/// Parse a flat `key = value` file with `#` comments.
pub fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "{}:{}: expected `key = value`, got {raw:?}",
                path.display(),
                lineno + 1
            ));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    /// Apply one config-file pair; unknown keys are rejected.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |k: &str, v: &str| format!("bad value {v:?} for config key {k}");
        match key {
            "truncation" => self.truncation = value.parse().map_err(|_| bad(key, value))?,
            "degree" => self.degree = value.parse().map_err(|_| bad(key, value))?,
            "tol" => self.tol = Some(value.parse().map_err(|_| bad(key, value))?),
            "grid" => self.grid = Some(GridSpec::parse(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "precision_bits" => {
                self.precision_bits = Some(value.parse().map_err(|_| bad(key, value))?)
            }
            "beta" => self.beta = value.parse().map_err(|_| bad(key, value))?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }
}
