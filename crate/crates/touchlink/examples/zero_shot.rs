//! Zero-shot classification: class prompts through the frozen text tower,
//! nearest prompt embedding wins.
//!
//! ```bash
//! cargo run --release --example zero_shot
//! ```

use touchlink::alignment::{train, TrainConfig};
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{EncoderBundle, EncoderConfig, LoRAConfig};
use touchlink::eval::{zero_shot_report, PromptTemplateSet, TaskKind};

fn main() -> anyhow::Result<()> {
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        seed: 7,
        ..Default::default()
    })?;
    let config = TrainConfig {
        batch_size: 16,
        epochs: 60,
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

    let prompts = PromptTemplateSet::touch_defaults(manifest.class_names.clone());
    println!("prompt templates:");
    for t in &prompts.templates {
        println!("  - {t}");
    }
    println!("\nrendered for class '{}':", prompts.labels[0]);
    for p in prompts.render(0) {
        println!("  - {p}");
    }

    for task in [TaskKind::Material, TaskKind::HardSoft, TaskKind::RoughSmooth] {
        let set = PromptTemplateSet::for_task(task, &manifest);
        let report = zero_shot_report(
            &bundle, &manifest, &samples, task, &set, "test", "example", 7,
        )?;
        println!(
            "\nzero-shot {} on the test split: {:.1}% over {} samples",
            task.name(),
            report.accuracy * 100.0,
            report.total()
        );
        println!("confusion (rows = truth): {:?}", report.confusion);
    }
    Ok(())
}
