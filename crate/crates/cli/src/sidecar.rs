//! JSON sidecars describing `mix` invocations: enough to replay the exact
//! artifact from the recorded seed and config hash.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DeskError, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MixSidecar {
    pub policy: String,
    pub alpha: f64,
    /// Policy parameters as given; BTreeMap keeps key order stable.
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    /// FNV-1a hash (hex) of the canonicalized invocation.
    pub config_hash: String,
    /// Input pair paths, when mixing an explicit pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<[String; 2]>,
    /// External weight map path (guided cutting).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    /// Dataset config path plus sample count, when mixing from a dataset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_config: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub outputs: Vec<SidecarEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SidecarEntry {
    pub image: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    pub lambda_nominal: f64,
    pub lambda_effective: f64,
}

impl MixSidecar {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("sidecar serializes");
        fs::write(path, json + "\n").map_err(DeskError::io(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(DeskError::io(path))?;
        serde_json::from_str(&text)
            .map_err(|e| DeskError::format(path, format!("bad sidecar: {e}")))
    }
}
