//! Modality alignment: text fusion, the contrastive objective, and the
//! training loop that ties the curriculum mix to it.

mod loss;
mod trainer;

pub use loss::{info_nce, info_nce_grad, info_nce_symmetric, retrieval_top1};
pub use trainer::{
    fused_text_for, run_training, train, train_backward, train_forward, ForwardState,
    StepDiagnostics, TrainOutput, Trainer,
};

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curriculum::{CurriculumError, CurriculumSchedule};
use crate::data::DataError;
use crate::encoders::EncoderError;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric error: zero-norm row {row} in {context}")]
    ZeroNorm { row: usize, context: String },
    #[error("non-finite loss {loss} at step {step} (beta {beta}, lr {lr})")]
    NonFiniteLoss { step: usize, loss: f64, beta: f64, lr: f64 },
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// `K x d` embedding rows for one modality, with a normalization flag.
/// When `normalized` is set every row has unit Euclidean norm (within 1e-6).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    rows: Array2<f64>,
    normalized: bool,
}

impl EmbeddingBatch {
    /// Wrap raw (unnormalized) encoder output.
    pub fn raw(rows: Array2<f64>) -> Self {
        debug_assert!(rows.iter().all(|v| v.is_finite()), "embeddings must be finite");
        Self { rows, normalized: false }
    }

    /// Wrap rows the caller asserts are unit-norm; verified.
    pub fn normalized(rows: Array2<f64>) -> Result<Self, AlignError> {
        for (i, row) in rows.axis_iter(Axis(0)).enumerate() {
            let norm = row.dot(&row).sqrt();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(AlignError::Contract(format!(
                    "row {i} has norm {norm}, expected unit"
                )));
            }
        }
        Ok(Self { rows, normalized: true })
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    /// L2-normalize each row. A zero-norm row is a numeric error naming the
    /// row rather than a silent NaN.
    pub fn into_normalized(self, context: &str) -> Result<Self, AlignError> {
        let rows = normalize_rows(self.rows, context)?;
        Ok(Self { rows, normalized: true })
    }
}

pub(crate) fn normalize_rows(mut rows: Array2<f64>, context: &str) -> Result<Array2<f64>, AlignError> {
    for (i, mut row) in rows.axis_iter_mut(Axis(0)).enumerate() {
        let norm = row.dot(&row).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(AlignError::ZeroNorm { row: i, context: context.to_string() });
        }
        row.mapv_inplace(|v| v / norm);
    }
    Ok(rows)
}

/// Fuse sentence- and phrase-level text embeddings into the final text
/// feature: normalize each granularity row-wise, average, normalize again.
pub fn fuse_text(
    sentence: &EmbeddingBatch,
    phrase: &EmbeddingBatch,
) -> Result<EmbeddingBatch, AlignError> {
    if sentence.rows.dim() != phrase.rows.dim() {
        return Err(AlignError::Shape(format!(
            "sentence batch {:?} vs phrase batch {:?}",
            sentence.rows.dim(),
            phrase.rows.dim()
        )));
    }
    let s = normalize_rows(sentence.rows.clone(), "sentence embeddings")?;
    let p = normalize_rows(phrase.rows.clone(), "phrase embeddings")?;
    let avg = (&s + &p) * 0.5;
    let fused = normalize_rows(avg, "fused text embeddings")?;
    Ok(EmbeddingBatch { rows: fused, normalized: true })
}

/// Warmup-then-cosine learning rate.
///
/// Linear ramp from 0 to `base_lr` over `warmup_steps`, then cosine decay
/// to 0 at `total_steps`.
pub fn lr_at_step(base_lr: f64, warmup_steps: usize, total_steps: usize, step: usize) -> f64 {
    assert!(step <= total_steps, "step {step} beyond total {total_steps}");
    if warmup_steps > 0 && step < warmup_steps {
        return base_lr * step as f64 / warmup_steps as f64;
    }
    let span = total_steps.saturating_sub(warmup_steps).max(1);
    let progress = (step - warmup_steps.min(step)) as f64 / span as f64;
    base_lr * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos())
}

/// Everything one training run needs besides the dataset and the towers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub base_lr: f64,
    pub warmup_steps: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub weight_decay: f64,
    pub temperature: f64,
    pub seed: u64,
    /// Initial teacher weight for the curriculum schedule.
    pub beta_start: f64,
    /// Ultimate teacher weight.
    pub beta_min: f64,
    /// `false` reproduces the no-curriculum ablation.
    pub curriculum: bool,
    /// Add the text-anchored direction of the loss (off by default; the
    /// printed objective is one-directional).
    pub symmetric_loss: bool,
    /// Normalize tower outputs before mixing instead of only after.
    pub normalize_before_mix: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        // Desk-scale preset; paper_scale() keeps the published regime.
        Self {
            batch_size: 16,
            epochs: 12,
            base_lr: 2e-4,
            warmup_steps: 20,
            adam_beta1: 0.9,
            adam_beta2: 0.98,
            weight_decay: 0.01,
            temperature: 0.07,
            seed: 7,
            beta_start: 0.9,
            beta_min: 0.0,
            curriculum: true,
            symmetric_loss: false,
            normalize_before_mix: false,
        }
    }
}

impl TrainConfig {
    /// The published optimization regime: batch 96, 12 epochs, base LR
    /// 2e-4, 200 warmup steps, momentum (0.9, 0.98).
    pub fn paper_scale() -> Self {
        Self { batch_size: 96, warmup_steps: 200, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), AlignError> {
        if self.batch_size == 0 {
            return Err(AlignError::Domain("batch_size must be positive".into()));
        }
        if self.base_lr <= 0.0 || self.temperature <= 0.0 {
            return Err(AlignError::Domain("base_lr and temperature must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(AlignError::Domain("adam momenta must lie in [0, 1)".into()));
        }
        if self.weight_decay < 0.0 {
            return Err(AlignError::Domain("weight_decay must be non-negative".into()));
        }
        CurriculumSchedule::new(self.beta_start, self.beta_min, 1, self.curriculum)?;
        Ok(())
    }

    /// Build the step schedule for a run of `total_steps`.
    pub fn schedule(&self, total_steps: usize) -> Result<CurriculumSchedule, AlignError> {
        Ok(CurriculumSchedule::new(
            self.beta_start,
            self.beta_min,
            total_steps.max(1),
            self.curriculum,
        )?)
    }
}

/// Mean over unit-normalized rows, renormalized — shared by grasp pooling
/// and prompt fusion.
pub fn mean_of_normalized(rows: &[Array1<f64>], context: &str) -> Result<Array1<f64>, AlignError> {
    if rows.is_empty() {
        return Err(AlignError::Domain(format!("{context}: empty set")));
    }
    let d = rows[0].len();
    let mut acc = Array1::<f64>::zeros(d);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(AlignError::Shape(format!("{context}: row {i} has dim {}", r.len())));
        }
        let norm = r.dot(r).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(AlignError::ZeroNorm { row: i, context: context.to_string() });
        }
        acc += &(r / norm);
    }
    acc /= rows.len() as f64;
    let norm = acc.dot(&acc).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(AlignError::ZeroNorm { row: 0, context: format!("{context}: mean") });
    }
    Ok(acc / norm)
}
