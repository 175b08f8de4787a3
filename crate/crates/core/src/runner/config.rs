//! Experiment configuration: a scenario, a list of policies with parameter
//! payloads, seeds, and output plumbing. Files are JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::simenv::ScenarioParams;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "AURA_OUT";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: String,
    /// Policy-specific parameters, passed through as-is. Null means
    /// defaults.
    #[serde(default)]
    pub params: serde_json::Value,
}

impl PolicySpec {
    pub fn plain(kind: &str) -> Self {
        PolicySpec {
            kind: kind.to_string(),
            params: serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub scenario_params: ScenarioParams,
    pub policies: Vec<PolicySpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// None runs the scenario's own default horizon.
    #[serde(default)]
    pub cycles: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Record wall-clock decision durations in traces. Off by default so
    /// repeated runs of the same config produce byte-identical files.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentConfig {
    pub fn new(scenario: &str, policies: Vec<PolicySpec>, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            scenario: scenario.to_string(),
            scenario_params: ScenarioParams::default(),
            policies,
            seeds,
            cycles: None,
            out_dir: None,
            record_timing: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = fs::read_to_string(path).map_err(|e| RunnerError::BadConfig {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        // serde_json reports line/column context in the error message.
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| RunnerError::BadConfig {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })?;
        cfg.validate().map_err(|e| RunnerError::BadConfig {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.policies.is_empty() {
            return Err(RunnerError::BadConfig {
                path: PathBuf::new(),
                detail: "at least one policy is required".into(),
            });
        }
        if self.seeds.is_empty() {
            return Err(RunnerError::BadConfig {
                path: PathBuf::new(),
                detail: "at least one seed is required".into(),
            });
        }
        Ok(())
    }

    /// Output directory precedence: explicit CLI flag, then the config
    /// field, then the environment variable, then ./aura-out.
    pub fn resolve_out_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        if let Some(p) = &self.out_dir {
            return p.clone();
        }
        if let Ok(p) = std::env::var(OUT_DIR_ENV) {
            if !p.is_empty() {
                return PathBuf::from(p);
            }
        }
        PathBuf::from("aura-out")
    }
}
