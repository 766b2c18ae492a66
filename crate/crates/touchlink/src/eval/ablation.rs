//! Ablation runners: dataset scale (nested train fractions) and the
//! curriculum on/off comparison. Each fraction or arm is a full training
//! run followed by both evaluation protocols on the fixed eval split.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::zeroshot::{zero_shot_report, PromptTemplateSet};
use super::{linear_probe_report, EvalError, EvalReport, TaskKind};
use crate::alignment::{run_training, StepDiagnostics, TrainConfig};
use crate::data::{subsample, DatasetManifest, Sample, SUBSAMPLE_FRACTIONS};
use crate::encoders::{EncoderBundle, EncoderConfig, LoRAConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleAblationRow {
    pub fraction: f64,
    pub train_size: usize,
    pub linear_probe: EvalReport,
    pub zero_shot: EvalReport,
}

fn fresh_bundle(
    encoder: &EncoderConfig,
    lora: &LoRAConfig,
    train: &TrainConfig,
) -> Result<EncoderBundle, EvalError> {
    EncoderBundle::new(*encoder, lora.clone(), train.temperature, train.seed)
        .map_err(EvalError::from)
}

/// One run per fraction in {25, 50, 75, 100}%. All runs share the seed, so
/// the train subsets nest; the eval split never changes.
#[allow(clippy::too_many_arguments)]
pub fn run_scale_ablation(
    out_dir: &Path,
    manifest: &DatasetManifest,
    samples: &[Sample],
    encoder: &EncoderConfig,
    lora: &LoRAConfig,
    train_cfg: &TrainConfig,
    task: TaskKind,
    eval_split: &str,
) -> Result<Vec<ScaleAblationRow>, EvalError> {
    let mut rows = Vec::with_capacity(SUBSAMPLE_FRACTIONS.len());
    for &fraction in &SUBSAMPLE_FRACTIONS {
        let sub_manifest = subsample(manifest, fraction, train_cfg.seed)?;
        let run_dir = out_dir.join(format!("scale_{:03}", (fraction * 100.0) as usize));
        let mut bundle = fresh_bundle(encoder, lora, train_cfg)?;
        run_training(&run_dir, &mut bundle, &sub_manifest, samples, train_cfg)?;
        let checkpoint = run_dir.join("checkpoint.json");
        let checkpoint_name = checkpoint.display().to_string();
        let (probe_report, _) = linear_probe_report(
            &bundle,
            &sub_manifest,
            samples,
            task,
            "train",
            eval_split,
            &checkpoint_name,
            train_cfg.seed,
        )?;
        let prompts = PromptTemplateSet::for_task(task, manifest);
        let zs_report = zero_shot_report(
            &bundle,
            &sub_manifest,
            samples,
            task,
            &prompts,
            eval_split,
            &checkpoint_name,
            train_cfg.seed,
        )?;
        rows.push(ScaleAblationRow {
            fraction,
            train_size: sub_manifest.split("train")?.len(),
            linear_probe: probe_report,
            zero_shot: zs_report,
        });
    }
    Ok(rows)
}

/// Aligned-column table over the scale rows: one row per fraction, one
/// column per protocol.
pub fn format_scale_table(dataset: &str, task: TaskKind, rows: &[ScaleAblationRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:>8} {:>8} {:>15} {:>12}\n",
        "Dataset", "Scale", "Train n", "Linear Probing", "Zero-Shot"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:>7.0}% {:>8} {:>15.1} {:>12.1}\n",
            dataset,
            r.fraction * 100.0,
            r.train_size,
            r.linear_probe.accuracy * 100.0,
            r.zero_shot.accuracy * 100.0,
        ));
    }
    let _ = task;
    out
}

/// Outcome of one arm (curriculum enabled or disabled) of the ablation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationArm {
    pub curriculum_enabled: bool,
    pub betas: Vec<f64>,
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurriculumAblation {
    pub enabled: AblationArm,
    pub disabled: AblationArm,
    pub tasks: Vec<TaskKind>,
}

fn arm_reports(
    bundle: &EncoderBundle,
    manifest: &DatasetManifest,
    samples: &[Sample],
    tasks: &[TaskKind],
    eval_split: &str,
    checkpoint: &str,
    seed: u64,
) -> Result<Vec<EvalReport>, EvalError> {
    let mut reports = Vec::new();
    for &task in tasks {
        let (probe, _) = linear_probe_report(
            bundle, manifest, samples, task, "train", eval_split, checkpoint, seed,
        )?;
        reports.push(probe);
        let prompts = PromptTemplateSet::for_task(task, manifest);
        reports.push(zero_shot_report(
            bundle, manifest, samples, task, &prompts, eval_split, checkpoint, seed,
        )?);
    }
    Ok(reports)
}

/// Paired runs that differ only in `schedule.enabled`. The disabled arm's
/// logged betas are identically zero by construction.
#[allow(clippy::too_many_arguments)]
pub fn run_curriculum_ablation(
    out_dir: &Path,
    manifest: &DatasetManifest,
    samples: &[Sample],
    encoder: &EncoderConfig,
    lora: &LoRAConfig,
    train_cfg: &TrainConfig,
    tasks: &[TaskKind],
    eval_split: &str,
) -> Result<CurriculumAblation, EvalError> {
    let mut arms = Vec::with_capacity(2);
    for enabled in [true, false] {
        let cfg = TrainConfig { curriculum: enabled, ..train_cfg.clone() };
        let run_dir = out_dir.join(if enabled { "with_curriculum" } else { "without_curriculum" });
        let mut bundle = fresh_bundle(encoder, lora, &cfg)?;
        let output = run_training(&run_dir, &mut bundle, manifest, samples, &cfg)?;
        let betas: Vec<f64> = output.metrics.iter().map(|m: &StepDiagnostics| m.beta).collect();
        let checkpoint = run_dir.join("checkpoint.json").display().to_string();
        let reports =
            arm_reports(&bundle, manifest, samples, tasks, eval_split, &checkpoint, cfg.seed)?;
        arms.push(AblationArm { curriculum_enabled: enabled, betas, reports });
    }
    let disabled = arms.pop().expect("two arms");
    let enabled = arms.pop().expect("two arms");
    Ok(CurriculumAblation { enabled, disabled, tasks: tasks.to_vec() })
}

/// Two rows (full model, no-curriculum) per protocol block, one column per
/// task.
pub fn format_curriculum_table(ablation: &CurriculumAblation) -> String {
    let mut out = String::new();
    let header: Vec<String> = ablation.tasks.iter().map(|t| t.name().to_string()).collect();
    out.push_str(&format!("{:<44}", "Model"));
    for h in &header {
        out.push_str(&format!(" {h:>14}"));
    }
    out.push('\n');
    for (protocol, label) in [
        (super::Protocol::LinearProbe, "Linear Probing"),
        (super::Protocol::ZeroShot, "Zero-Shot"),
    ] {
        out.push_str(&format!("[{label}]\n"));
        for arm in [&ablation.enabled, &ablation.disabled] {
            let name = if arm.curriculum_enabled {
                "with curriculum representation"
            } else {
                "w/o curriculum representation"
            };
            out.push_str(&format!("{name:<44}"));
            for &task in &ablation.tasks {
                let acc = arm
                    .reports
                    .iter()
                    .find(|r| r.task == task && r.protocol == protocol)
                    .map(|r| r.accuracy * 100.0)
                    .unwrap_or(f64::NAN);
                out.push_str(&format!(" {acc:>14.1}"));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticConfig};

    fn tiny_inputs() -> (DatasetManifest, Vec<Sample>, EncoderConfig, LoRAConfig, TrainConfig) {
        let (manifest, samples) = generate_synthetic(&SyntheticConfig {
            samples: 16,
            height: 16,
            width: 16,
            ..Default::default()
        })
        .unwrap();
        let encoder = EncoderConfig {
            image_size: 16,
            patch_size: 8,
            depth: 1,
            width: 8,
            heads: 2,
            embed_dim: 8,
            vocab_size: 256,
            max_text_len: 16,
        };
        let train = TrainConfig {
            batch_size: 4,
            epochs: 1,
            warmup_steps: 0,
            base_lr: 1e-3,
            ..Default::default()
        };
        (manifest, samples, encoder, LoRAConfig { rank: 2, ..Default::default() }, train)
    }

    #[test]
    fn scale_ablation_produces_four_nested_rows() {
        let (manifest, samples, encoder, lora, train) = tiny_inputs();
        let dir = tempfile::tempdir().unwrap();
        let rows = run_scale_ablation(
            dir.path(),
            &manifest,
            &samples,
            &encoder,
            &lora,
            &train,
            TaskKind::Material,
            "test",
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(
            rows.iter().map(|r| r.fraction).collect::<Vec<_>>(),
            vec![0.25, 0.5, 0.75, 1.0]
        );
        for w in rows.windows(2) {
            assert!(w[0].train_size <= w[1].train_size);
        }
        let table = format_scale_table(&manifest.name, TaskKind::Material, &rows);
        assert_eq!(table.lines().count(), 5);
    }

    #[test]
    fn curriculum_ablation_differs_only_in_schedule() {
        let (manifest, samples, encoder, lora, train) = tiny_inputs();
        let dir = tempfile::tempdir().unwrap();
        let ablation = run_curriculum_ablation(
            dir.path(),
            &manifest,
            &samples,
            &encoder,
            &lora,
            &train,
            &[TaskKind::Material, TaskKind::HardSoft],
            "test",
        )
        .unwrap();
        assert!(ablation.enabled.curriculum_enabled);
        assert!(!ablation.disabled.curriculum_enabled);
        assert!(ablation.disabled.betas.iter().all(|&b| b == 0.0));
        assert!(ablation.enabled.betas[0] > 0.0);
        // 2 protocols x 2 tasks per arm.
        assert_eq!(ablation.enabled.reports.len(), 4);
        let table = format_curriculum_table(&ablation);
        assert!(table.contains("w/o curriculum representation"));
    }
}
