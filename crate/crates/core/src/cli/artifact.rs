//! Versioned JSON model files.
//!
//! Floats are written with shortest round-trip formatting and read back with
//! exact parsing, so a save/load cycle reproduces every parameter bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::{Scaler, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::network::{param_count, LossKind, NetworkConfig, NetworkParams};

pub const FORMAT_VERSION: u64 = 1;

/// Where the stored weights came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingFingerprint {
    pub seed: u64,
    pub loss: LossKind,
    pub best_epoch: usize,
    pub chronological: bool,
    pub ratios: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub net_config: NetworkConfig,
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub params: NetworkParams,
    pub training: TrainingFingerprint,
}

#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    format_version: u64,
    net_config: NetworkConfig,
    feature_names: Vec<String>,
    scaler: Scaler,
    params: Payload,
    training: TrainingFingerprint,
}

#[derive(Serialize, Deserialize)]
struct Payload {
    /// `[units, fan_in]` per layer.
    shapes: Vec<[usize; 2]>,
    /// Layer by layer, weights row-major then biases.
    values: Vec<f64>,
}

impl ModelArtifact {
    pub fn new(
        net_config: NetworkConfig,
        scaler: Scaler,
        params: NetworkParams,
        training: TrainingFingerprint,
    ) -> ModelArtifact {
        ModelArtifact {
            net_config,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            scaler,
            params,
            training,
        }
    }

    pub fn to_json(&self) -> String {
        let file = ArtifactFile {
            format_version: FORMAT_VERSION,
            net_config: self.net_config.clone(),
            feature_names: self.feature_names.clone(),
            scaler: self.scaler.clone(),
            params: Payload {
                shapes: self
                    .params
                    .layers
                    .iter()
                    .map(|l| [l.units, l.fan_in])
                    .collect(),
                values: self.params.to_flat(),
            },
            training: self.training.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("artifact serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<ModelArtifact> {
        let raw: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Artifact(format!("not a readable model file: {e}")))?;
        let version = raw
            .get("format_version")
            .ok_or_else(|| Error::Artifact("missing format_version".into()))?
            .as_u64()
            .ok_or_else(|| Error::Artifact("format_version is not an integer".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::ArtifactVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let file: ArtifactFile = serde_json::from_value(raw)
            .map_err(|e| Error::Artifact(format!("malformed model file: {e}")))?;

        let cfg = file.net_config;
        cfg.validate()
            .map_err(|e| Error::Artifact(format!("invalid network configuration: {e}")))?;
        let expected_shapes: Vec<[usize; 2]> =
            cfg.shapes().into_iter().map(|(u, f)| [u, f]).collect();
        if file.params.shapes != expected_shapes {
            return Err(Error::Artifact(
                "layer shapes disagree with the network configuration".into(),
            ));
        }
        let expected = param_count(&cfg);
        if file.params.values.len() != expected {
            return Err(Error::Artifact(format!(
                "parameter payload has {} values, configuration needs {expected}",
                file.params.values.len()
            )));
        }
        let params = NetworkParams::from_flat(&cfg, &file.params.values)
            .map_err(|e| Error::Artifact(e.to_string()))?;
        file.scaler
            .validate()
            .map_err(|e| Error::Artifact(format!("invalid scaler: {e}")))?;
        if file.scaler.dim() != cfg.input_dim || file.feature_names.len() != cfg.input_dim {
            return Err(Error::Artifact(format!(
                "scaler and feature list must both cover {} inputs",
                cfg.input_dim
            )));
        }
        let ratios = file.training.ratios;
        if ratios.iter().any(|r| r.is_nan() || *r < 0.0)
            || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::Artifact("split ratios do not sum to 1".into()));
        }
        Ok(ModelArtifact {
            net_config: cfg,
            feature_names: file.feature_names,
            scaler: file.scaler,
            params,
            training: file.training,
        })
    }
}

pub fn save_model(path: &Path, artifact: &ModelArtifact) -> Result<()> {
    fs::write(path, artifact.to_json())?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelArtifact> {
    let text = fs::read_to_string(path)?;
    ModelArtifact::from_json(&text)
}
