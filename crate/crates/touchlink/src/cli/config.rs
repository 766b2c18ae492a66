//! Run configuration: a flat TOML document with `[data]`, `[model]`, and
//! `[train]` sections. Command-line flags override file values; the fully
//! resolved snapshot lands in the run manifest so experiments diff cleanly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alignment::TrainConfig;
use crate::encoders::{EncoderConfig, LoRAConfig, LoraTarget};

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub grasp_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub image_size: u32,
    pub patch_size: u32,
    pub depth: usize,
    pub width: usize,
    pub heads: usize,
    pub embed_dim: usize,
    pub vocab_size: usize,
    pub max_text_len: usize,
    pub lora_rank: usize,
    pub lora_alpha: f64,
    pub lora_targets: Vec<LoraTarget>,
}

impl Default for ModelSection {
    fn default() -> Self {
        let enc = EncoderConfig::default();
        let lora = LoRAConfig::default();
        Self {
            image_size: enc.image_size,
            patch_size: enc.patch_size,
            depth: enc.depth,
            width: enc.width,
            heads: enc.heads,
            embed_dim: enc.embed_dim,
            vocab_size: enc.vocab_size,
            max_text_len: enc.max_text_len,
            lora_rank: lora.rank,
            lora_alpha: lora.alpha,
            lora_targets: lora.targets,
        }
    }
}

impl ModelSection {
    pub fn encoder_config(&self) -> EncoderConfig {
        EncoderConfig {
            image_size: self.image_size,
            patch_size: self.patch_size,
            depth: self.depth,
            width: self.width,
            heads: self.heads,
            embed_dim: self.embed_dim,
            vocab_size: self.vocab_size,
            max_text_len: self.max_text_len,
        }
    }

    pub fn lora_config(&self) -> LoRAConfig {
        LoRAConfig {
            rank: self.lora_rank,
            alpha: self.lora_alpha,
            targets: self.lora_targets.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub batch_size: usize,
    pub epochs: usize,
    pub base_lr: f64,
    pub warmup_steps: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub weight_decay: f64,
    pub temperature: f64,
    pub seed: u64,
    pub beta_start: f64,
    pub beta_min: f64,
    pub curriculum: bool,
    pub symmetric_loss: bool,
    pub normalize_before_mix: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            batch_size: t.batch_size,
            epochs: t.epochs,
            base_lr: t.base_lr,
            warmup_steps: t.warmup_steps,
            adam_beta1: t.adam_beta1,
            adam_beta2: t.adam_beta2,
            weight_decay: t.weight_decay,
            temperature: t.temperature,
            seed: t.seed,
            beta_start: t.beta_start,
            beta_min: t.beta_min,
            curriculum: t.curriculum,
            symmetric_loss: t.symmetric_loss,
            normalize_before_mix: t.normalize_before_mix,
        }
    }
}

impl TrainSection {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            epochs: self.epochs,
            base_lr: self.base_lr,
            warmup_steps: self.warmup_steps,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            weight_decay: self.weight_decay,
            temperature: self.temperature,
            seed: self.seed,
            beta_start: self.beta_start,
            beta_min: self.beta_min,
            curriculum: self.curriculum,
            symmetric_loss: self.symmetric_loss,
            normalize_before_mix: self.normalize_before_mix,
        }
    }
}

/// The whole config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub model: ModelSection,
    pub train: TrainSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&body).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, String> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }
}
