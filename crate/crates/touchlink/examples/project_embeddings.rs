//! Project learned touch embeddings to 2-D and export a CSV plus a scatter
//! plot colored by class.
//!
//! ```bash
//! cargo run --release --example project_embeddings
//! ```

use touchlink::alignment::{train, TrainConfig};
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{EncoderBundle, EncoderConfig, LoRAConfig};
use touchlink::eval::{project_2d, split_samples, touch_embeddings, write_projection, TaskKind, TsneOptions};

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

    let subset = split_samples(&manifest, &samples, "train")?;
    let embeddings = touch_embeddings(&bundle, &subset, TaskKind::Material)?;
    let coords = project_2d(&embeddings, &TsneOptions { seed: 7, ..Default::default() })?;
    println!("projected {} embeddings to 2-D", coords.nrows());

    let ids: Vec<String> = subset.iter().map(|s| s.id.clone()).collect();
    let labels: Vec<usize> = subset.iter().map(|s| s.labels.material).collect();
    let stem = std::env::temp_dir().join("touchlink_examples/projection");
    std::fs::create_dir_all(stem.parent().unwrap())?;
    let (csv, png) = write_projection(&stem, &ids, &labels, manifest.class_names.len(), &coords)?;
    println!("coordinates: {}", csv.display());
    println!("scatter:     {}", png.display());

    // Per-class centroid spread as a quick separation readout.
    let m = manifest.class_names.len();
    let mut centroid = vec![(0.0f64, 0.0f64, 0.0f64); m];
    for (i, &label) in labels.iter().enumerate() {
        centroid[label].0 += coords[[i, 0]];
        centroid[label].1 += coords[[i, 1]];
        centroid[label].2 += 1.0;
    }
    println!("\nclass centroids in the plane:");
    for (c, (x, y, n)) in centroid.iter().enumerate() {
        println!("  {:<10} ({:>8.2}, {:>8.2})", manifest.class_names[c], x / n, y / n);
    }
    Ok(())
}
