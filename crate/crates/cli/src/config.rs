//! On-disk run configuration: flat `key = value` pairs under `[section]`
//! headers (TOML subset). The effective config is always dumped next to the
//! outputs so a run can be replayed bit-for-bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crow_core::dynamics::RampSchedule;
use crow_core::model::ModelParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_modes: usize,
    /// Optional output restriction; rows outside [k_min, k_max] are dropped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_modes: 256,
            k_min: None,
            k_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    Delta,
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub variable: ScanVariable,
    pub k: f64,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreConfig {
    pub center_k: f64,
    pub width_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<u8>,
    pub sample_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Units,
    pub model: ModelParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub store: Option<StoreConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<RampSchedule>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model
            .validated()
            .map_err(|e| CliError::Usage(format!("[model] {e}")))?;
        if self.units == Units::Natural && self.model.j_hop.abs() > 1e3 {
            eprintln!(
                "warning: |j_hop| = {:e} under the natural unit tag looks like an SI value",
                self.model.j_hop
            );
        }
        if let Some(g) = &self.grid {
            if let (Some(lo), Some(hi)) = (g.k_min, g.k_max) {
                if lo > hi {
                    return Err(CliError::Usage(format!(
                        "[grid] k_min = {lo} exceeds k_max = {hi}"
                    )));
                }
            }
        }
        if let Some(s) = &self.scan {
            if s.min > s.max {
                return Err(CliError::Usage(format!(
                    "[scan] min = {} exceeds max = {}",
                    s.min, s.max
                )));
            }
            if s.points < 2 {
                return Err(CliError::Usage(format!(
                    "[scan] needs at least 2 points, got {}",
                    s.points
                )));
            }
        }
        if let Some(s) = &self.store {
            if s.width_k <= 0.0 {
                return Err(CliError::Usage("[store] width_k must be positive".into()));
            }
            if s.sample_dt <= 0.0 {
                return Err(CliError::Usage("[store] sample_dt must be positive".into()));
            }
        }
        if let Some(s) = &self.schedule {
            s.validated()
                .map_err(|e| CliError::Usage(format!("[schedule] {e}")))?;
        }
        Ok(())
    }

    /// Serialize to the config text format with stable key order.
    pub fn dump(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }
}
