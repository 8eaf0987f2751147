//! Optional TOML configuration. Command-line flags override it; `seed`
//! falls back to `TROPPCA_SEED` and then to 0.

use std::path::Path;

use serde::Deserialize;

use crate::error::{AppError, AppResult};

pub const SEED_ENV: &str = "TROPPCA_SEED";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub vertices: Option<usize>,
    pub iterations: Option<usize>,
    pub cooling_interval: Option<usize>,
    pub chains: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub force_equidistant: Option<bool>,
    pub mode: Option<String>,
    pub percentile: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        toml::from_str(text).map_err(|e| AppError::Usage(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> AppResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| AppError::io(p.display().to_string(), e))?;
                Self::parse(&text)
            }
        }
    }

    /// Flag, then config file, then environment, then 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> AppResult<u64> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| AppError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }
}
