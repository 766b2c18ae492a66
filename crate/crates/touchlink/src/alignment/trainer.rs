//! The pretraining loop: curriculum-mixed image representations aligned to
//! fused text features, optimized with decoupled-weight-decay Adam under a
//! warmup-then-cosine learning rate.
//!
//! Only the trainable partition (touch tower + adapters) ever reaches the
//! optimizer; the run asserts at the end that every frozen tensor is
//! bitwise unchanged.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;

use super::loss::info_nce_grad;
use super::{fuse_text, lr_at_step, normalize_rows, AlignError, EmbeddingBatch, TrainConfig};
use crate::curriculum::{curriculum_mix_batch, CurriculumSchedule};
use crate::data::{DatasetManifest, Sample};
use crate::encoders::{encode_text, save_checkpoint, CheckpointMeta, EncoderBundle, VitCtx};
use crate::nn::AdamW;
use crate::util::{fnv1a, rng_for};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub loss: f64,
    pub beta: f64,
    pub lr: f64,
    pub grad_norm: f64,
}

#[derive(Debug)]
pub struct TrainOutput {
    pub metrics: Vec<StepDiagnostics>,
    pub schedule: CurriculumSchedule,
    pub steps_per_epoch: usize,
    pub total_steps: usize,
    pub checkpoint_path: Option<PathBuf>,
}

/// Everything the backward pass needs from one forward evaluation.
pub struct ForwardState {
    pub loss: f64,
    pub beta: f64,
    /// Normalized curriculum representations (the anchors).
    pub anchors: Array2<f64>,
    /// Raw touch-tower output.
    pub touch_raw: Array2<f64>,
    /// Raw vision-tower output (adapter path).
    pub vision_raw: Array2<f64>,
    /// Fused text features (constants; the text tower is frozen).
    pub text_rows: Array2<f64>,
    mixed: Array2<f64>,
    touch_ctx: VitCtx,
    vision_ctx: VitCtx,
    // Set when normalize_before_mix is on: the normalized tower outputs.
    pre_norm: Option<(Array2<f64>, Array2<f64>)>,
}

fn row_norms(rows: &Array2<f64>) -> Array1<f64> {
    rows.map_axis(Axis(1), |r| r.dot(&r).sqrt())
}

/// Backward of row-wise L2 normalization: given the normalized rows `x`,
/// the pre-normalization norms, and `d/dx`, return `d/d(raw)`.
fn normalize_backward(x: &Array2<f64>, norms: &Array1<f64>, dx: &Array2<f64>) -> Array2<f64> {
    let inner = (dx * x).sum_axis(Axis(1)).insert_axis(Axis(1));
    let mut out = dx - &(x * &inner);
    out /= &norms.clone().insert_axis(Axis(1));
    out
}

/// Forward the curriculum-contrastive objective over one batch.
///
/// `text_rows` are the fused, normalized text features row-aligned to the
/// batch. Returns everything needed to backpropagate.
pub fn train_forward(
    bundle: &EncoderBundle,
    batch: &[&Sample],
    beta: f64,
    config: &TrainConfig,
    text_rows: Array2<f64>,
) -> Result<ForwardState, AlignError> {
    let touch_images: Vec<_> = batch.iter().map(|s| &s.touch_image).collect();
    let vision_images: Vec<_> = batch.iter().map(|s| &s.vision_image).collect();
    let (touch_raw, touch_ctx) = bundle.touch.forward(&touch_images, true)?;
    let (vision_raw, vision_ctx) = bundle.vision.forward(&vision_images, true)?;

    let (t_in, v_in, pre_norm) = if config.normalize_before_mix {
        let t = normalize_rows(touch_raw.clone(), "touch embeddings")?;
        let v = normalize_rows(vision_raw.clone(), "vision embeddings")?;
        (t.clone(), v.clone(), Some((t, v)))
    } else {
        (touch_raw.clone(), vision_raw.clone(), None)
    };
    let mixed = curriculum_mix_batch(v_in.view(), t_in.view(), beta)?;
    let anchors = normalize_rows(mixed.clone(), "curriculum representations")?;

    let (loss, _) = info_nce_grad(&anchors, &text_rows, config.temperature, config.symmetric_loss);
    Ok(ForwardState {
        loss,
        beta,
        anchors,
        touch_raw,
        vision_raw,
        text_rows,
        mixed,
        touch_ctx,
        vision_ctx,
        pre_norm,
    })
}

/// Backpropagate through mix, normalization, and both image towers,
/// accumulating gradients into the trainable parameters. Returns the global
/// gradient norm over the trainable set.
pub fn train_backward(
    bundle: &mut EncoderBundle,
    state: &ForwardState,
    config: &TrainConfig,
) -> f64 {
    bundle.zero_grads();
    let (_, d_anchor) = info_nce_grad(
        &state.anchors,
        &state.text_rows,
        config.temperature,
        config.symmetric_loss,
    );
    let mix_norms = row_norms(&state.mixed);
    let d_mixed = normalize_backward(&state.anchors, &mix_norms, &d_anchor);
    let mut d_vision = &d_mixed * state.beta;
    let mut d_touch = &d_mixed * (1.0 - state.beta);
    if let Some((t_unit, v_unit)) = &state.pre_norm {
        let t_norms = row_norms(&state.touch_raw);
        let v_norms = row_norms(&state.vision_raw);
        d_touch = normalize_backward(t_unit, &t_norms, &d_touch);
        d_vision = normalize_backward(v_unit, &v_norms, &d_vision);
    }
    bundle.touch.backward(&state.touch_ctx, &d_touch);
    bundle.vision.backward(&state.vision_ctx, &d_vision);

    bundle
        .trainable_parameters()
        .iter()
        .map(|p| p.grad_sq_sum())
        .sum::<f64>()
        .sqrt()
}

/// Stateful runner holding the optimizer and the frozen-text cache.
pub struct Trainer {
    pub config: TrainConfig,
    pub schedule: CurriculumSchedule,
    pub total_steps: usize,
    optimizer: AdamW,
    text_cache: HashMap<String, Array1<f64>>,
}

impl Trainer {
    pub fn new(config: TrainConfig, total_steps: usize) -> Result<Self, AlignError> {
        config.validate()?;
        let schedule = config.schedule(total_steps)?;
        let optimizer = AdamW::new(config.adam_beta1, config.adam_beta2, config.weight_decay);
        Ok(Self { config, schedule, total_steps, optimizer, text_cache: HashMap::new() })
    }

    /// Fused text features for a batch, computed once per sample id (the
    /// text tower is frozen, so rows never go stale).
    pub fn fused_text_rows(
        &mut self,
        bundle: &EncoderBundle,
        batch: &[&Sample],
    ) -> Result<Array2<f64>, AlignError> {
        let missing: Vec<&Sample> = batch
            .iter()
            .filter(|s| !self.text_cache.contains_key(&s.id))
            .copied()
            .collect();
        if !missing.is_empty() {
            let sentences: Vec<&str> =
                missing.iter().map(|s| s.sentence_description.as_str()).collect();
            let joined: Vec<String> =
                missing.iter().map(|s| s.phrase_descriptions.join(", ")).collect();
            let phrase_refs: Vec<&str> = joined.iter().map(String::as_str).collect();
            let sentence_emb = encode_text(&bundle.text, &sentences)?;
            let phrase_emb = encode_text(&bundle.text, &phrase_refs)?;
            let fused = fuse_text(&sentence_emb, &phrase_emb)?;
            for (s, row) in missing.iter().zip(fused.rows().axis_iter(Axis(0))) {
                self.text_cache.insert(s.id.clone(), row.to_owned());
            }
        }
        let d = bundle.text.embed_dim();
        let mut rows = Array2::zeros((batch.len(), d));
        for (i, s) in batch.iter().enumerate() {
            rows.row_mut(i).assign(&self.text_cache[&s.id]);
        }
        Ok(rows)
    }

    /// One optimization step at global step index `step`.
    pub fn step(
        &mut self,
        bundle: &mut EncoderBundle,
        batch: &[&Sample],
        step: usize,
    ) -> Result<StepDiagnostics, AlignError> {
        let beta = self.schedule.beta_at_step(step)?;
        let lr = lr_at_step(self.config.base_lr, self.config.warmup_steps, self.total_steps, step);
        let text_rows = self.fused_text_rows(bundle, batch)?;
        let state = train_forward(bundle, batch, beta, &self.config, text_rows)?;
        if !state.loss.is_finite() {
            return Err(AlignError::NonFiniteLoss { step, loss: state.loss, beta, lr });
        }
        let grad_norm = train_backward(bundle, &state, &self.config);
        let mut trainable = bundle.trainable_parameters();
        self.optimizer.step(&mut trainable, lr);
        Ok(StepDiagnostics { step, loss: state.loss, beta, lr, grad_norm })
    }
}

fn frozen_fingerprint(bundle: &EncoderBundle) -> u64 {
    let mut bytes = Vec::new();
    for p in bundle.all_parameters() {
        if !p.trainable {
            bytes.extend_from_slice(p.name.as_bytes());
            for v in p.value.iter() {
                bytes.extend_from_slice(&v.to_bits().to_le_bytes());
            }
        }
    }
    fnv1a(&bytes)
}

/// Run the full schedule: `epochs x steps_per_epoch` steps with seeded
/// shuffling per epoch. Deterministic given the seed on a single thread.
pub fn train(
    bundle: &mut EncoderBundle,
    manifest: &DatasetManifest,
    samples: &[Sample],
    config: &TrainConfig,
) -> Result<TrainOutput, AlignError> {
    config.validate()?;
    let by_id: HashMap<&str, &Sample> = samples.iter().map(|s| (s.id.as_str(), s)).collect();
    let train_ids = manifest.split("train")?;
    if train_ids.is_empty() {
        return Err(AlignError::Domain("train split is empty".into()));
    }
    for id in train_ids {
        if !by_id.contains_key(id.as_str()) {
            return Err(AlignError::Domain(format!("train id {id} not among loaded samples")));
        }
    }
    let batch_size = config.batch_size.min(train_ids.len());
    let steps_per_epoch = (train_ids.len() / batch_size).max(1);
    let total_steps = steps_per_epoch * config.epochs;

    let frozen_before = frozen_fingerprint(bundle);
    let mut trainer = Trainer::new(config.clone(), total_steps)?;
    let mut metrics = Vec::with_capacity(total_steps);
    let mut step = 0usize;
    for epoch in 0..config.epochs {
        let mut order: Vec<&str> = train_ids.iter().map(String::as_str).collect();
        order.shuffle(&mut rng_for(config.seed, &format!("train.shuffle.{epoch}")));
        for chunk in order.chunks(batch_size).take(steps_per_epoch) {
            if chunk.len() < batch_size {
                break;
            }
            let batch: Vec<&Sample> = chunk.iter().map(|id| by_id[id]).collect();
            metrics.push(trainer.step(bundle, &batch, step)?);
            step += 1;
        }
    }
    assert_eq!(
        frozen_fingerprint(bundle),
        frozen_before,
        "frozen parameters were mutated during training"
    );
    Ok(TrainOutput {
        metrics,
        schedule: trainer.schedule,
        steps_per_epoch,
        total_steps,
        checkpoint_path: None,
    })
}

/// Train and persist: checkpoint JSON plus a step-indexed metrics CSV with
/// columns `step,loss,beta,lr,grad_norm`.
pub fn run_training(
    out_dir: &Path,
    bundle: &mut EncoderBundle,
    manifest: &DatasetManifest,
    samples: &[Sample],
    config: &TrainConfig,
) -> Result<TrainOutput, AlignError> {
    std::fs::create_dir_all(out_dir)?;
    let mut output = train(bundle, manifest, samples, config)?;
    let metrics_path = out_dir.join("metrics.csv");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&metrics_path)?);
    writeln!(f, "step,loss,beta,lr,grad_norm")?;
    for m in &output.metrics {
        writeln!(f, "{},{},{},{},{}", m.step, m.loss, m.beta, m.lr, m.grad_norm)?;
    }
    f.flush()?;
    let checkpoint_path = out_dir.join("checkpoint.json");
    save_checkpoint(
        &checkpoint_path,
        bundle,
        CheckpointMeta {
            seed: config.seed,
            step_count: output.total_steps,
            schedule: Some(output.schedule),
            note: format!("trained on {}", manifest.name),
        },
    )?;
    output.checkpoint_path = Some(checkpoint_path);
    Ok(output)
}

/// Fused text rows for arbitrary samples (no cache), for evaluation code.
pub fn fused_text_for(
    bundle: &EncoderBundle,
    samples: &[&Sample],
) -> Result<EmbeddingBatch, AlignError> {
    let sentences: Vec<&str> = samples.iter().map(|s| s.sentence_description.as_str()).collect();
    let joined: Vec<String> = samples.iter().map(|s| s.phrase_descriptions.join(", ")).collect();
    let phrase_refs: Vec<&str> = joined.iter().map(String::as_str).collect();
    let sentence_emb = encode_text(&bundle.text, &sentences)?;
    let phrase_emb = encode_text(&bundle.text, &phrase_refs)?;
    fuse_text(&sentence_emb, &phrase_emb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticConfig};
    use crate::encoders::{EncoderConfig, LoRAConfig};

    fn tiny_setup() -> (EncoderBundle, DatasetManifest, Vec<Sample>, TrainConfig) {
        let cfg = EncoderConfig {
            image_size: 16,
            patch_size: 8,
            depth: 1,
            width: 8,
            heads: 2,
            embed_dim: 8,
            vocab_size: 128,
            max_text_len: 16,
        };
        let bundle = EncoderBundle::new(cfg, LoRAConfig { rank: 2, ..Default::default() }, 0.07, 5).unwrap();
        let data_cfg = SyntheticConfig { samples: 8, height: 16, width: 16, ..Default::default() };
        let (manifest, samples) = generate_synthetic(&data_cfg).unwrap();
        let config = TrainConfig {
            batch_size: 4,
            epochs: 1,
            base_lr: 1e-3,
            warmup_steps: 0,
            ..Default::default()
        };
        (bundle, manifest, samples, config)
    }

    #[test]
    fn disabled_curriculum_anchors_equal_normalized_touch() {
        let (bundle, _, samples, config) = tiny_setup();
        let batch: Vec<&Sample> = samples.iter().take(4).collect();
        let mut trainer = Trainer::new(
            TrainConfig { curriculum: false, ..config },
            10,
        )
        .unwrap();
        let text = trainer.fused_text_rows(&bundle, &batch).unwrap();
        let beta = trainer.schedule.beta_at_step(0).unwrap();
        assert_eq!(beta, 0.0);
        let state = train_forward(&bundle, &batch, beta, &trainer.config, text).unwrap();
        let expected = normalize_rows(state.touch_raw.clone(), "t").unwrap();
        assert_eq!(state.anchors, expected);
    }

    #[test]
    fn first_step_uses_beta_start() {
        let (mut bundle, _, samples, config) = tiny_setup();
        let batch: Vec<&Sample> = samples.iter().take(4).collect();
        let mut trainer = Trainer::new(config, 10).unwrap();
        let diag = trainer.step(&mut bundle, &batch, 0).unwrap();
        assert_eq!(diag.beta, 0.9);
        assert!(diag.loss.is_finite());
        assert!(diag.grad_norm > 0.0);
    }

    #[test]
    fn zero_epochs_leaves_the_bundle_at_initialization() {
        let (mut bundle, manifest, samples, config) = tiny_setup();
        let before: Vec<Vec<u64>> = bundle
            .all_parameters()
            .iter()
            .map(|p| p.value.iter().map(|v| v.to_bits()).collect())
            .collect();
        let out = train(
            &mut bundle,
            &manifest,
            &samples,
            &TrainConfig { epochs: 0, ..config },
        )
        .unwrap();
        assert!(out.metrics.is_empty());
        let after: Vec<Vec<u64>> = bundle
            .all_parameters()
            .iter()
            .map(|p| p.value.iter().map(|v| v.to_bits()).collect())
            .collect();
        assert_eq!(before, after);
    }

    #[test]
    fn schedule_records_total_steps() {
        let (mut bundle, manifest, samples, config) = tiny_setup();
        let out = train(&mut bundle, &manifest, &samples, &TrainConfig { epochs: 3, ..config }).unwrap();
        // 4 train samples at batch 4 -> 1 step per epoch.
        assert_eq!(out.steps_per_epoch, 1);
        assert_eq!(out.schedule.total_steps, 3);
        assert_eq!(out.metrics.len(), 3);
        for (i, m) in out.metrics.iter().enumerate() {
            assert_eq!(m.beta, out.schedule.beta_at_step(i).unwrap());
        }
    }

    #[test]
    fn beta_logged_matches_schedule_exactly() {
        let (mut bundle, manifest, samples, config) = tiny_setup();
        let out = train(&mut bundle, &manifest, &samples, &TrainConfig { epochs: 2, ..config }).unwrap();
        for m in &out.metrics {
            assert_eq!(m.beta, out.schedule.beta_at_step(m.step).unwrap());
        }
    }
}
