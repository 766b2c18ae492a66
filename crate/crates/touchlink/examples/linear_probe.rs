//! Linear probing: train briefly, freeze, fit a logistic head on the touch
//! embeddings, and report held-out accuracy per task.
//!
//! ```bash
//! cargo run --release --example linear_probe
//! ```

use touchlink::alignment::{train, TrainConfig};
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{EncoderBundle, EncoderConfig, LoRAConfig};
use touchlink::eval::{linear_probe_report, TaskKind};

fn main() -> anyhow::Result<()> {
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

    println!("{:<14} {:>10} {:>8}", "task", "accuracy%", "n");
    for task in [TaskKind::Material, TaskKind::HardSoft, TaskKind::RoughSmooth] {
        let (report, probe) = linear_probe_report(
            &bundle, &manifest, &samples, task, "train", "test", "example", 7,
        )?;
        println!(
            "{:<14} {:>10.1} {:>8}   (head fit in {} iterations, grad norm {:.1e})",
            task.name(),
            report.accuracy * 100.0,
            report.total(),
            probe.iterations,
            probe.final_grad_norm,
        );
    }
    Ok(())
}
