//! Curriculum ablation: paired runs differing only in whether the teacher
//! schedule is enabled, with the no-curriculum arm logging beta = 0 at
//! every step.
//!
//! ```bash
//! cargo run --release --example curriculum_ablation
//! ```

use touchlink::alignment::TrainConfig;
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{EncoderConfig, LoRAConfig};
use touchlink::eval::{format_curriculum_table, run_curriculum_ablation, TaskKind};

fn main() -> anyhow::Result<()> {
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        seed: 7,
        ..Default::default()
    })?;
    let train = TrainConfig {
        batch_size: 16,
        epochs: 40,
        base_lr: 5e-3,
        warmup_steps: 20,
        temperature: 0.05,
        seed: 7,
        ..Default::default()
    };
    let out_dir = std::env::temp_dir().join("touchlink_examples/curriculum_ablation");
    let ablation = run_curriculum_ablation(
        &out_dir,
        &manifest,
        &samples,
        &EncoderConfig::default(),
        &LoRAConfig::default(),
        &train,
        &[TaskKind::Material, TaskKind::HardSoft, TaskKind::RoughSmooth],
        "test",
    )?;

    print!("{}", format_curriculum_table(&ablation));
    println!(
        "\nbeta trace, enabled arm:  {:.3} -> {:.3} over {} steps",
        ablation.enabled.betas.first().unwrap(),
        ablation.enabled.betas.last().unwrap(),
        ablation.enabled.betas.len()
    );
    println!(
        "beta trace, disabled arm: all zero ({} steps): {}",
        ablation.disabled.betas.len(),
        ablation.disabled.betas.iter().all(|&b| b == 0.0)
    );
    println!("run artifacts under {}", out_dir.display());
    Ok(())
}
