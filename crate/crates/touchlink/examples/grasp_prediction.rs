//! Grasp-outcome prediction from four tactile frames (before/after x
//! left/right), pooled into one embedding per attempt.
//!
//! ```bash
//! cargo run --release --example grasp_prediction
//! ```

use ndarray::array;
use touchlink::alignment::{train, TrainConfig};
use touchlink::data::{generate_grasp, generate_synthetic, GraspConfig, SyntheticConfig};
use touchlink::encoders::{EncoderBundle, EncoderConfig, LoRAConfig};
use touchlink::eval::{
    linear_probe_report, pool_grasp, zero_shot_report, PromptTemplateSet, TaskKind,
};

fn main() -> anyhow::Result<()> {
    // Pooling rule on a hand-built case: mean of the four frames,
    // renormalized.
    let pooled = pool_grasp(&[
        array![1.0, 0.0],
        array![0.0, 1.0],
        array![1.0, 0.0],
        array![0.0, 1.0],
    ])?;
    println!("pooled hand-built frames: ({:.4}, {:.4})", pooled[0], pooled[1]);

    // Pretrain on the material dataset, then evaluate grasp prediction.
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        seed: 7,
        ..Default::default()
    })?;
    let config = TrainConfig {
        batch_size: 16,
        epochs: 40,
        base_lr: 5e-3,
        warmup_steps: 20,
        temperature: 0.05,
        seed: 7,
        ..Default::default()
    };
    let mut bundle = EncoderBundle::new(
        EncoderConfig::default(),
        LoRAConfig::default(),
        config.temperature,
        config.seed,
    )?;
    train(&mut bundle, &manifest, &samples, &config)?;

    let (grasp_manifest, grasp_samples) =
        generate_grasp(&GraspConfig { samples: 64, seed: 7, ..Default::default() })?;
    println!(
        "\ngrasp dataset: {} attempts, classes {:?}",
        grasp_manifest.size, grasp_manifest.class_names
    );

    let (probe_report, _) = linear_probe_report(
        &bundle,
        &grasp_manifest,
        &grasp_samples,
        TaskKind::Grasp,
        "train",
        "test",
        "example",
        7,
    )?;
    println!(
        "linear probe on pooled embeddings: {:.1}% over {}",
        probe_report.accuracy * 100.0,
        probe_report.total()
    );

    let prompts = PromptTemplateSet::for_task(TaskKind::Grasp, &grasp_manifest);
    let zs_report = zero_shot_report(
        &bundle,
        &grasp_manifest,
        &grasp_samples,
        TaskKind::Grasp,
        &prompts,
        "test",
        "example",
        7,
    )?;
    println!(
        "zero-shot with grasp prompts:      {:.1}% over {}",
        zs_report.accuracy * 100.0,
        zs_report.total()
    );
    Ok(())
}
