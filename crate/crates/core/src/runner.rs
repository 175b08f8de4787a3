//! Experiment driver: scenario + policy configuration, the Sense-Decide-Act
//! loop with trace persistence, and the acceptance suites the CLI exposes.

pub mod config;
pub mod experiment;
pub mod factory;
pub mod suites;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::domain::ConfigError;
use crate::oracle::OracleError;
use crate::simenv::{EnvError, ScenarioError};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config {path}: {detail}")]
    BadConfig { path: PathBuf, detail: String },
    #[error("unknown policy kind `{0}`")]
    UnknownPolicy(String),
    #[error("policy `{kind}` params: {detail}")]
    BadPolicyParams { kind: String, detail: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Pool(#[from] ConfigError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("summary serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub use config::{ExperimentConfig, PolicySpec};
pub use experiment::{run_experiment, run_single, ExperimentSummary, RunSummary};
pub use factory::{build_policy, POLICY_KINDS};
pub use suites::{run_suite, CriterionResult, SuiteReport, SUITE_NAMES};
