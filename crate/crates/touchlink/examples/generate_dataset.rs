//! Generate the synthetic paired dataset, persist it, and load it back.
//!
//! ```bash
//! cargo run --release --example generate_dataset
//! ```

use touchlink::data::{generate_synthetic, load_all, save_dataset, SyntheticConfig};

fn main() -> anyhow::Result<()> {
    let config = SyntheticConfig {
        class_count: 4,
        samples: 64,
        height: 32,
        width: 32,
        seed: 7,
        corruption_rate: 0.25,
    };
    let (manifest, samples) = generate_synthetic(&config)?;
    println!(
        "generated '{}': {} records, classes {:?}",
        manifest.name, manifest.size, manifest.class_names
    );
    for (split, ids) in &manifest.splits {
        println!("  split {split}: {} ids", ids.len());
    }

    let sample = &samples[0];
    println!("\nfirst record ({}):", sample.id);
    println!("  sentence: {}", sample.sentence_description);
    println!("  phrases:  {}", sample.phrase_descriptions.join(" | "));
    println!(
        "  labels:   material={} hard={} rough={}",
        sample.labels.material, sample.labels.hard_soft, sample.labels.rough_smooth
    );
    let corrupted = samples.iter().filter(|s| s.corruption_tag.is_some()).count();
    println!("\n{corrupted} records carry one injected text defect (for filter tests)");

    let dir = std::env::temp_dir().join("touchlink_examples/dataset");
    save_dataset(&dir, &manifest, &samples)?;
    let (reloaded, records) = load_all(&dir)?;
    println!(
        "\nround trip through {}: {} records back, manifest matches: {}",
        dir.display(),
        records.len(),
        reloaded == manifest
    );
    Ok(())
}
