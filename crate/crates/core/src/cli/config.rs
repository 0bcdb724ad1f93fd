//! Run configuration.
//!
//! Precedence: command-line flag, then `HYPERDERIV_SEED` (seed only), then
//! the config file, then the built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::matproof::fixtures::MAX_DIM;

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "HYPERDERIV_SEED";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub truncation_degree: usize,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol_exact: f64,
    pub tol_fd: f64,
    pub quad_nodes: usize,
    pub report_path: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            truncation_degree: 8,
            dims: vec![2, 3, 4],
            trials: 20,
            seed: 42,
            tol_exact: 1e-10,
            tol_fd: 1e-7,
            quad_nodes: 32,
            report_path: None,
        }
    }
}

impl Config {
    /// Parses `key = value` text. Unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: Config = toml::from_str(text).map_err(|e| format!("config: {}", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Defaults, overlaid by the file when given, then by `env_seed`.
    pub fn resolve(path: Option<&Path>, env_seed: Option<&str>) -> Result<Self, String> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Config::default(),
        };
        if let Some(s) = env_seed {
            cfg.seed = s.trim().parse().map_err(|_| format!("{SEED_ENV}: `{s}` is not an unsigned integer"))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.tol_exact > 0.0 && self.tol_fd > 0.0) {
            return Err("config: tolerances must be positive".into());
        }
        if self.truncation_degree == 0 {
            return Err("config: truncation_degree must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=MAX_DIM).contains(&d)) {
            return Err(format!("config: dims must be non-empty and within 2..={MAX_DIM}"));
        }
        if self.trials == 0 || self.quad_nodes == 0 {
            return Err("config: trials and quad_nodes must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults_and_env_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 7\ntrials = 5\ndims = [3]\n").unwrap();
        let cfg = Config::resolve(Some(&path), None).unwrap();
        assert_eq!((cfg.seed, cfg.trials, cfg.dims.clone()), (7, 5, vec![3]));
        assert_eq!(cfg.tol_exact, 1e-10);
        assert_eq!(Config::resolve(Some(&path), Some("9")).unwrap().seed, 9);
        assert!(Config::resolve(None, Some("x")).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(Config::from_toml("tol_exact = 0.0").is_err());
        assert!(Config::from_toml("dims = [1]").is_err());
        assert!(Config::from_toml("truncation_degree = 0").is_err());
        assert!(Config::from_toml("colour = 3").is_err());
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }
}
