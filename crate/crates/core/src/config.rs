//! Run configuration, read from JSON. Missing fields take their defaults
//! and unknown fields are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{DEFAULT_Q_GRID, MAX_SCAN_Q};
use crate::model::{DistributionParams, ModelParams};
use crate::numerics::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub dist: DistributionParams,
    pub quadrature: QuadratureSpec,
    pub fisher_q_grid: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            dist: DistributionParams::default(),
            quadrature: QuadratureSpec::default(),
            fisher_q_grid: DEFAULT_Q_GRID.to_vec(),
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        validate_q_grid(&self.fisher_q_grid)
    }
}

pub fn validate_q_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("fisher_q_grid is empty".into()));
    }
    if grid.iter().any(|&q| !(q > 0.0 && q <= MAX_SCAN_Q)) {
        return Err(Error::InvalidParams(format!(
            "fisher_q_grid values must lie in (0, {MAX_SCAN_Q}]"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("fisher_q_grid must be strictly increasing".into()));
    }
    Ok(())
}
