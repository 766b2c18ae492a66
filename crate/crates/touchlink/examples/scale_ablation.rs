//! Dataset-scale ablation: nested 25/50/75/100% train subsets, one
//! training run each, both protocols on the fixed eval split.
//!
//! ```bash
//! cargo run --release --example scale_ablation
//! ```

use touchlink::alignment::TrainConfig;
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{EncoderConfig, LoRAConfig};
use touchlink::eval::{format_scale_table, run_scale_ablation, TaskKind};

fn main() -> anyhow::Result<()> {
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        seed: 7,
        ..Default::default()
    })?;
    let train = TrainConfig {
        batch_size: 8,
        epochs: 25,
        base_lr: 5e-3,
        warmup_steps: 10,
        temperature: 0.05,
        seed: 7,
        ..Default::default()
    };
    let out_dir = std::env::temp_dir().join("touchlink_examples/scale_ablation");
    let rows = run_scale_ablation(
        &out_dir,
        &manifest,
        &samples,
        &EncoderConfig::default(),
        &LoRAConfig::default(),
        &train,
        TaskKind::Material,
        "test",
    )?;
    print!("{}", format_scale_table(&manifest.name, TaskKind::Material, &rows));
    println!("\nper-fraction run artifacts under {}", out_dir.display());
    Ok(())
}
