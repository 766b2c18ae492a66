//! Pretrain the touch representation on synthetic data and watch the
//! contrastive loss fall and in-batch retrieval rise.
//!
//! ```bash
//! cargo run --release --example train_alignment
//! ```

use touchlink::alignment::{fused_text_for, retrieval_top1, run_training, TrainConfig};
use touchlink::data::{generate_synthetic, Sample, SyntheticConfig};
use touchlink::encoders::{encode_image, EncoderBundle, EncoderConfig, LoRAConfig};
use touchlink::eval::split_samples;

fn main() -> anyhow::Result<()> {
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        seed: 7,
        ..Default::default()
    })?;
    let config = TrainConfig {
        batch_size: 16,
        epochs: 120, // 48 train samples -> 3 steps per epoch -> 360 steps
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

    let out_dir = std::env::temp_dir().join("touchlink_examples/train");
    let started = std::time::Instant::now();
    let output = run_training(&out_dir, &mut bundle, &manifest, &samples, &config)?;
    println!(
        "trained {} steps in {:.1} s (schedule: beta {} -> {} over {} steps)",
        output.total_steps,
        started.elapsed().as_secs_f64(),
        config.beta_start,
        config.beta_min,
        output.schedule.total_steps
    );

    println!("\n{:>6} {:>10} {:>8} {:>10}", "step", "loss", "beta", "lr");
    for m in output.metrics.iter().step_by(30) {
        println!("{:>6} {:>10.4} {:>8.4} {:>10.2e}", m.step, m.loss, m.beta, m.lr);
    }
    let last = output.metrics.last().unwrap();
    println!("{:>6} {:>10.4} {:>8.4} {:>10.2e}  (final)", last.step, last.loss, last.beta, last.lr);

    // In-batch touch->text retrieval with the trained weights.
    let train = split_samples(&manifest, &samples, "train")?;
    let mut hit_rate = 0.0;
    let mut batches = 0.0;
    for chunk in train.chunks(16) {
        if chunk.len() < 16 {
            break;
        }
        let imgs: Vec<_> = chunk.iter().map(|s| &s.touch_image).collect();
        let x = encode_image(&bundle.touch, &imgs, true)?.into_normalized("touch")?;
        let y = fused_text_for(&bundle, &(chunk.iter().copied().collect::<Vec<&Sample>>()))?;
        hit_rate += retrieval_top1(x.rows(), y.rows());
        batches += 1.0;
    }
    println!("\nin-batch retrieval top-1 on the train split: {:.1}%", 100.0 * hit_rate / batches);
    println!("artifacts under {}", out_dir.display());
    Ok(())
}
