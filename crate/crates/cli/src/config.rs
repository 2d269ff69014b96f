//! The JSON run configuration shared by every subcommand.

use std::fmt;
use std::path::{Path, PathBuf};

use clcgan::diracgan::{ObjectiveKind, Realization};
use clcgan::simulate::SimConfig;
use clcgan::traingan::TrainConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::schema;

/// Bad flags or an invalid configuration; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub objective: Option<ObjectiveKind>,
    /// Data location of the Dirac GAN.
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    pub realization: Option<Realization>,
    pub init: Option<InitState>,
    pub sim: Option<SimConfig<f64>>,
    pub train: Option<TrainConfig>,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitState {
    pub phi: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[default]
    Dirac,
    Train,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub target: Target,
    pub objectives: Vec<ObjectiveKind>,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_realizations")]
    pub realizations: Vec<Realization>,
}

fn default_realizations() -> Vec<Realization> {
    vec![Realization::InputFeedback]
}

impl RunConfig {
    /// Reads, schema-checks and parses a configuration file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
        Self::from_value(value).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn from_value(value: Value) -> Result<Self, String> {
        schema::check(schema::RUN_CONFIG, &value)?;
        serde_json::from_value(value).map_err(|e| e.to_string())
    }

    pub fn load_opt(path: Option<&Path>) -> anyhow::Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// Parses a flag value through the type's serde names.
pub fn parse_serde<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_owned())).map_err(|e| e.to_string())
}
