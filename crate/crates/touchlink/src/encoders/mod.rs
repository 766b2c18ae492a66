//! Encoder towers and the trainable/frozen parameter partition.
//!
//! The bundle mirrors the pretraining setup: the touch tower is fully
//! trainable, the vision tower keeps its base weights frozen with low-rank
//! adapters on the attention query/value projections, and the text tower is
//! frozen outright. `trainable_parameters` is the single source of truth
//! for what the optimizer may touch.

mod checkpoint;
mod text;
mod vit;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointMeta};
pub use text::{tokenize, TextTransformer, PAD_ID, UNK_ID};
pub use vit::{VisionTransformer, VitCtx};

use image::RgbImage;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::EmbeddingBatch;
use crate::nn::{AdapterSites, Param};

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid encoder configuration: {0}")]
    Config(String),
    #[error("text {index} is empty after tokenization")]
    EmptyText { index: usize },
    #[error("non-finite values in {0}")]
    NonFinite(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

/// Architecture of the image and text towers. The defaults are the desk
/// preset; the full-scale reference configuration (24 layers, width 1024,
/// patch 14) is available via [`EncoderConfig::full_scale`] for anyone with
/// the hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub image_size: u32,
    pub patch_size: u32,
    pub depth: usize,
    pub width: usize,
    pub heads: usize,
    pub embed_dim: usize,
    pub vocab_size: usize,
    pub max_text_len: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            image_size: 32,
            patch_size: 8,
            depth: 2,
            width: 64,
            heads: 4,
            embed_dim: 32,
            vocab_size: 4096,
            max_text_len: 32,
        }
    }
}

impl EncoderConfig {
    /// Reference configuration at publication scale. Untrainable on a desk
    /// CPU; kept for documentation and config files.
    pub fn full_scale() -> Self {
        Self {
            image_size: 224,
            patch_size: 14,
            depth: 24,
            width: 1024,
            heads: 16,
            embed_dim: 768,
            vocab_size: 49408,
            max_text_len: 77,
        }
    }

    pub fn validate(&self) -> Result<(), EncoderError> {
        if self.image_size == 0 || self.patch_size == 0 || self.image_size % self.patch_size != 0 {
            return Err(EncoderError::Config(format!(
                "image_size {} must be a positive multiple of patch_size {}",
                self.image_size, self.patch_size
            )));
        }
        if self.width == 0 || self.heads == 0 || self.width % self.heads != 0 {
            return Err(EncoderError::Config(format!(
                "width {} must be a positive multiple of heads {}",
                self.width, self.heads
            )));
        }
        if self.depth == 0 || self.embed_dim == 0 {
            return Err(EncoderError::Config("depth and embed_dim must be positive".into()));
        }
        if self.vocab_size <= 2 || self.max_text_len == 0 {
            return Err(EncoderError::Config("vocab_size must exceed the reserved ids".into()));
        }
        Ok(())
    }
}

/// Which attention projections receive adapters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoraTarget {
    Query,
    Value,
}

/// Low-rank adapter hyperparameters for the vision tower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoRAConfig {
    pub rank: usize,
    pub alpha: f64,
    pub targets: Vec<LoraTarget>,
}

impl Default for LoRAConfig {
    fn default() -> Self {
        Self { rank: 4, alpha: 8.0, targets: vec![LoraTarget::Query, LoraTarget::Value] }
    }
}

impl LoRAConfig {
    pub fn adapter_sites(&self) -> AdapterSites {
        AdapterSites {
            query: self.targets.contains(&LoraTarget::Query),
            value: self.targets.contains(&LoraTarget::Value),
        }
    }

    pub fn validate(&self, width: usize) -> Result<(), EncoderError> {
        if self.rank == 0 || self.rank > width {
            return Err(EncoderError::Config(format!(
                "lora rank {} must lie in [1, {width}] for width-{width} projections",
                self.rank
            )));
        }
        if self.alpha <= 0.0 {
            return Err(EncoderError::Config("lora alpha must be positive".into()));
        }
        if self.targets.is_empty() {
            return Err(EncoderError::Config("lora targets must be non-empty".into()));
        }
        Ok(())
    }
}

/// The three towers plus the contrastive temperature.
#[derive(Debug, Clone)]
pub struct EncoderBundle {
    pub touch: VisionTransformer,
    pub vision: VisionTransformer,
    pub text: TextTransformer,
    pub temperature: f64,
    pub encoder_config: EncoderConfig,
    pub lora_config: LoRAConfig,
    pub seed: u64,
}

impl EncoderBundle {
    pub fn new(
        encoder_config: EncoderConfig,
        lora_config: LoRAConfig,
        temperature: f64,
        seed: u64,
    ) -> Result<Self, EncoderError> {
        encoder_config.validate()?;
        lora_config.validate(encoder_config.width)?;
        if temperature <= 0.0 {
            return Err(EncoderError::Config("temperature must be positive".into()));
        }
        Ok(Self {
            touch: VisionTransformer::new("touch", &encoder_config, None, true, seed),
            vision: VisionTransformer::new("vision", &encoder_config, Some(&lora_config), false, seed),
            text: TextTransformer::new("text", &encoder_config, seed),
            temperature,
            encoder_config,
            lora_config,
            seed,
        })
    }

    /// Exactly the parameters the optimizer may update: every touch-tower
    /// tensor plus the adapter A/B matrices inside the vision tower.
    pub fn trainable_parameters(&mut self) -> Vec<&mut Param> {
        let mut out: Vec<&mut Param> = self
            .touch
            .params_mut()
            .into_iter()
            .chain(self.vision.params_mut())
            .chain(self.text.params_mut())
            .filter(|p| p.trainable)
            .collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    /// All parameters, frozen and trainable, in stable name order.
    pub fn all_parameters(&self) -> Vec<&Param> {
        let mut out: Vec<&Param> = self
            .touch
            .params()
            .into_iter()
            .chain(self.vision.params())
            .chain(self.text.params())
            .collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    pub fn zero_grads(&mut self) {
        for p in self.touch.params_mut() {
            p.zero_grad();
        }
        for p in self.vision.params_mut() {
            p.zero_grad();
        }
    }

    /// Install an externally trained tensor (for example, pretrained text
    /// tower weights) under its parameter name. The shape must match and
    /// the freeze flag is preserved.
    pub fn set_parameter(&mut self, name: &str, value: Array2<f64>) -> Result<(), EncoderError> {
        for tower in [self.touch.params_mut(), self.vision.params_mut(), self.text.params_mut()] {
            for p in tower {
                if p.name == name {
                    if p.value.dim() != value.dim() {
                        return Err(EncoderError::Shape(format!(
                            "{name}: expected {:?}, got {:?}",
                            p.value.dim(),
                            value.dim()
                        )));
                    }
                    p.value = value;
                    return Ok(());
                }
            }
        }
        Err(EncoderError::Config(format!("no parameter named {name}")))
    }
}

/// Encode a batch of images with one tower. Deterministic given parameters;
/// the result is unnormalized.
pub fn encode_image(
    tower: &VisionTransformer,
    images: &[&RgbImage],
    normalize_pixels: bool,
) -> Result<EmbeddingBatch, EncoderError> {
    let (rows, _) = tower.forward(images, normalize_pixels)?;
    Ok(EmbeddingBatch::raw(rows))
}

/// Encode a batch of strings with the (frozen) text tower.
pub fn encode_text(tower: &TextTransformer, texts: &[&str]) -> Result<EmbeddingBatch, EncoderError> {
    Ok(EmbeddingBatch::raw(tower.forward(texts)?))
}

/// Adapter forward for a single vector: `base*x + (alpha/r) * B*(A*x)`.
///
/// This is the reference arithmetic the layered implementation must agree
/// with; it is exposed for direct use and for equivalence tests.
pub fn lora_forward(
    base: &Array2<f64>,
    a: &Array2<f64>,
    b: &Array2<f64>,
    alpha: f64,
    x: &Array1<f64>,
) -> Result<Array1<f64>, EncoderError> {
    let (m, n) = base.dim();
    let r = a.nrows();
    if a.ncols() != n {
        return Err(EncoderError::Shape(format!(
            "A is {}x{}, base expects {} input columns",
            r,
            a.ncols(),
            n
        )));
    }
    if b.dim() != (m, r) {
        return Err(EncoderError::Shape(format!(
            "B is {}x{}, need {m}x{r}",
            b.nrows(),
            b.ncols()
        )));
    }
    if x.len() != n {
        return Err(EncoderError::Shape(format!("x has {} entries, need {n}", x.len())));
    }
    if r == 0 {
        return Err(EncoderError::Shape("rank must be positive".into()));
    }
    Ok(base.dot(x) + b.dot(&a.dot(x)) * (alpha / r as f64))
}
