use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use tangentlab::io::{CurveConfig, LagrangianConfig, SampleConfig};

use crate::commands::Failure;

pub fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<T, Failure> {
    let path =
        path.ok_or_else(|| Failure::Config("this command needs --config <path.json>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsConfig {
    pub lagrangian: LagrangianConfig,
    #[serde(default)]
    pub curves: Vec<CurveConfig>,
    /// Kinetic energy over `t, x, y, z, x', y', z'`; defaults to `(x'^2 + y'^2 + z'^2)/2`.
    #[serde(default)]
    pub kinetic: Option<String>,
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    #[serde(default)]
    pub t_samples: Option<usize>,
    #[serde(default)]
    pub panels: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "Q")]
    pub q: String,
    /// Name of the spatial variable paired with `t`.
    #[serde(default = "default_var")]
    pub var: String,
    #[serde(default)]
    pub reference: [f64; 2],
    #[serde(default)]
    pub sample: Option<SampleConfig>,
    /// Points `(t, s)` at which to report `u`.
    #[serde(default)]
    pub at: Vec<[f64; 2]>,
    #[serde(default)]
    pub panels: Option<usize>,
}

fn default_var() -> String {
    "x".into()
}
