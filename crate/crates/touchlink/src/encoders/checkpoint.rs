//! Checkpoints: one JSON document holding every named parameter array, the
//! encoder and adapter configs, the temperature, and run metadata. JSON
//! floats round-trip `f64` exactly, so save/load preserves weights bitwise.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{EncoderBundle, EncoderConfig, EncoderError, LoRAConfig};
use crate::curriculum::CurriculumSchedule;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub seed: u64,
    pub step_count: usize,
    pub schedule: Option<CurriculumSchedule>,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamJson {
    rows: usize,
    cols: usize,
    trainable: bool,
    data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    format_version: u32,
    pub encoder_config: EncoderConfig,
    pub lora_config: LoRAConfig,
    pub temperature: f64,
    pub meta: CheckpointMeta,
    params: BTreeMap<String, ParamJson>,
}

impl Checkpoint {
    pub fn from_bundle(bundle: &EncoderBundle, meta: CheckpointMeta) -> Self {
        let mut params = BTreeMap::new();
        for p in bundle.all_parameters() {
            params.insert(
                p.name.clone(),
                ParamJson {
                    rows: p.value.nrows(),
                    cols: p.value.ncols(),
                    trainable: p.trainable,
                    data: p.value.iter().copied().collect(),
                },
            );
        }
        Self {
            format_version: FORMAT_VERSION,
            encoder_config: bundle.encoder_config,
            lora_config: bundle.lora_config.clone(),
            temperature: bundle.temperature,
            meta,
            params,
        }
    }

    pub fn into_bundle(self) -> Result<(EncoderBundle, CheckpointMeta), EncoderError> {
        if self.format_version != FORMAT_VERSION {
            return Err(EncoderError::Checkpoint(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        let mut bundle = EncoderBundle::new(
            self.encoder_config,
            self.lora_config.clone(),
            self.temperature,
            self.meta.seed,
        )?;
        let mut remaining = self.params;
        for tower in [bundle.touch.params_mut(), bundle.vision.params_mut(), bundle.text.params_mut()] {
            for p in tower {
                let stored = remaining.remove(&p.name).ok_or_else(|| {
                    EncoderError::Checkpoint(format!("checkpoint missing parameter {}", p.name))
                })?;
                if (stored.rows, stored.cols) != (p.value.nrows(), p.value.ncols()) {
                    return Err(EncoderError::Checkpoint(format!(
                        "parameter {} is {}x{} in the checkpoint but {}x{} in the model",
                        p.name,
                        stored.rows,
                        stored.cols,
                        p.value.nrows(),
                        p.value.ncols()
                    )));
                }
                p.value = Array2::from_shape_vec((stored.rows, stored.cols), stored.data)
                    .map_err(|e| EncoderError::Checkpoint(e.to_string()))?;
            }
        }
        if let Some(name) = remaining.keys().next() {
            return Err(EncoderError::Checkpoint(format!(
                "checkpoint holds unknown parameter {name}"
            )));
        }
        Ok((bundle, self.meta))
    }
}

pub fn save_checkpoint(
    path: &Path,
    bundle: &EncoderBundle,
    meta: CheckpointMeta,
) -> Result<(), EncoderError> {
    let ckpt = Checkpoint::from_bundle(bundle, meta);
    let body = serde_json::to_string(&ckpt).map_err(|e| EncoderError::Checkpoint(e.to_string()))?;
    std::fs::write(path, body)
        .map_err(|e| EncoderError::Checkpoint(format!("{}: {e}", path.display())))
}

pub fn load_checkpoint(path: &Path) -> Result<(EncoderBundle, CheckpointMeta), EncoderError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| EncoderError::Checkpoint(format!("{}: {e}", path.display())))?;
    let ckpt: Checkpoint =
        serde_json::from_str(&body).map_err(|e| EncoderError::Checkpoint(e.to_string()))?;
    ckpt.into_bundle()
}
