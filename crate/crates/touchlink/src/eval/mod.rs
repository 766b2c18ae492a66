//! Evaluation protocols: linear probing, zero-shot classification, grasp
//! pooling, chance calibration, dataset-scale and curriculum ablations, and
//! 2-D projection export.

mod ablation;
mod probe;
mod tsne;
mod zeroshot;

pub use ablation::{
    format_curriculum_table, format_scale_table, run_curriculum_ablation, run_scale_ablation,
    CurriculumAblation, ScaleAblationRow,
};
pub use probe::{fit_linear_probe, linear_probe_report, LinearProbe, ProbeOptions};
pub use tsne::{project_2d, write_projection, TsneOptions};
pub use zeroshot::{
    class_prompt_embeddings, zero_shot_classify, zero_shot_report, PromptTemplateSet,
};

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::AlignError;
use crate::data::{DataError, DatasetManifest, Sample};
use crate::encoders::{EncoderBundle, EncoderError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// The four downstream tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Material,
    HardSoft,
    RoughSmooth,
    Grasp,
}

impl TaskKind {
    pub fn parse(name: &str) -> Result<Self, EvalError> {
        match name {
            "material" => Ok(Self::Material),
            "hard_soft" => Ok(Self::HardSoft),
            "rough_smooth" => Ok(Self::RoughSmooth),
            "grasp" => Ok(Self::Grasp),
            other => Err(EvalError::Config(format!(
                "unknown task '{other}' (expected material, hard_soft, rough_smooth, grasp)"
            ))),
        }
    }

    pub fn label_of(&self, sample: &Sample) -> Result<usize, EvalError> {
        match self {
            Self::Material => Ok(sample.labels.material),
            Self::HardSoft => Ok(sample.labels.hard_soft as usize),
            Self::RoughSmooth => Ok(sample.labels.rough_smooth as usize),
            Self::Grasp => sample
                .grasp
                .as_ref()
                .map(|g| g.success as usize)
                .ok_or_else(|| {
                    EvalError::Validation(format!("sample {} has no grasp observation", sample.id))
                }),
        }
    }

    pub fn class_names(&self, manifest: &DatasetManifest) -> Vec<String> {
        match self {
            Self::Material => manifest.class_names.clone(),
            Self::HardSoft => vec!["soft".into(), "hard".into()],
            Self::RoughSmooth => vec!["smooth".into(), "rough".into()],
            Self::Grasp => vec!["failed".into(), "successful".into()],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Material => "material",
            Self::HardSoft => "hard_soft",
            Self::RoughSmooth => "rough_smooth",
            Self::Grasp => "grasp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    LinearProbe,
    ZeroShot,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearProbe => "linear_probe",
            Self::ZeroShot => "zero_shot",
        }
    }
}

/// One evaluation outcome. Accuracy is always the confusion-matrix trace
/// ratio; the constructor enforces it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskKind,
    pub protocol: Protocol,
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    pub checkpoint: String,
    pub split: String,
    pub seed: u64,
}

impl EvalReport {
    pub fn from_confusion(
        task: TaskKind,
        protocol: Protocol,
        confusion: Vec<Vec<usize>>,
        checkpoint: &str,
        split: &str,
        seed: u64,
    ) -> Self {
        let trace: usize = confusion.iter().enumerate().map(|(i, row)| row[i]).sum();
        let total: usize = confusion.iter().map(|row| row.iter().sum::<usize>()).sum();
        let accuracy = if total == 0 { 0.0 } else { trace as f64 / total as f64 };
        Self {
            task,
            protocol,
            accuracy,
            confusion,
            checkpoint: checkpoint.to_string(),
            split: split.to_string(),
            seed,
        }
    }

    /// Accumulate a confusion matrix from (truth, prediction) pairs.
    pub fn tally(m: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
        let mut confusion = vec![vec![0usize; m]; m];
        for (truth, pred) in pairs {
            confusion[truth][pred] += 1;
        }
        confusion
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().map(|r| r.iter().sum::<usize>()).sum()
    }
}

/// Normalized touch embeddings for a set of samples, encoded in fixed-size
/// chunks. Grasp samples pool their four frames.
pub fn touch_embeddings(
    bundle: &EncoderBundle,
    samples: &[&Sample],
    task: TaskKind,
) -> Result<Array2<f64>, EvalError> {
    let d = bundle.touch.embed_dim();
    let mut out = Array2::zeros((samples.len(), d));
    if task == TaskKind::Grasp {
        for (i, s) in samples.iter().enumerate() {
            let g = s.grasp.as_ref().ok_or_else(|| {
                EvalError::Validation(format!("sample {} has no grasp observation", s.id))
            })?;
            let frames: Vec<_> = g.frames.iter().collect();
            let (emb, _) = bundle.touch.forward(&frames, true)?;
            let rows: Vec<Array1<f64>> = emb.axis_iter(Axis(0)).map(|r| r.to_owned()).collect();
            let pooled = pool_grasp(&rows)?;
            out.row_mut(i).assign(&pooled);
        }
        return Ok(out);
    }
    for (chunk_idx, chunk) in samples.chunks(32).enumerate() {
        let imgs: Vec<_> = chunk.iter().map(|s| &s.touch_image).collect();
        let emb = crate::encoders::encode_image(&bundle.touch, &imgs, true)?
            .into_normalized("touch embeddings")?;
        for (j, row) in emb.rows().axis_iter(Axis(0)).enumerate() {
            out.row_mut(chunk_idx * 32 + j).assign(&row);
        }
    }
    Ok(out)
}

/// Mean of the four grasp-frame embeddings, renormalized.
pub fn pool_grasp(frames: &[Array1<f64>]) -> Result<Array1<f64>, EvalError> {
    if frames.len() != 4 {
        return Err(EvalError::Validation(format!(
            "grasp pooling needs exactly 4 frames, got {}",
            frames.len()
        )));
    }
    let d = frames[0].len();
    let mut mean = Array1::<f64>::zeros(d);
    for f in frames {
        if f.len() != d {
            return Err(EvalError::Validation("grasp frames differ in dimension".into()));
        }
        mean += f;
    }
    mean /= 4.0;
    let norm = mean.dot(&mean).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(EvalError::Degenerate("grasp pooling produced a zero vector".into()));
    }
    Ok(mean / norm)
}

/// Uniform-random predictor pushed through the same confusion harness the
/// real protocols use; calibrates the chance baseline.
pub fn chance_report(m: usize, n: usize, seed: u64) -> Result<EvalReport, EvalError> {
    if m < 2 || n == 0 {
        return Err(EvalError::Config("chance baseline needs m >= 2 and n >= 1".into()));
    }
    let mut rng = crate::util::rng_for(seed, "eval.chance");
    let pairs: Vec<(usize, usize)> = (0..n)
        .map(|_| (rng.gen_range(0..m), rng.gen_range(0..m)))
        .collect();
    let confusion = EvalReport::tally(m, pairs);
    Ok(EvalReport::from_confusion(
        TaskKind::Material,
        Protocol::ZeroShot,
        confusion,
        "chance",
        "synthetic",
        seed,
    ))
}

/// Select the samples of a split, in split order.
pub fn split_samples<'a>(
    manifest: &DatasetManifest,
    samples: &'a [Sample],
    split: &str,
) -> Result<Vec<&'a Sample>, EvalError> {
    let by_id: std::collections::HashMap<&str, &Sample> =
        samples.iter().map(|s| (s.id.as_str(), s)).collect();
    manifest
        .split(split)?
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| EvalError::Validation(format!("split id {id} not loaded")))
        })
        .collect()
}
