//! The description curation pipeline: prompt-pool sampling, regex pattern
//! filtering, consistency judging, and the human-review correction queue.
//!
//! With `JUDGE_URL` unset this uses the deterministic mock judge.
//!
//! ```bash
//! cargo run --example curate_descriptions
//! ```

use touchlink::curation::{
    curate, judge_from_env, pattern_filter, sample_prompt, write_queue, Granularity, PromptPool,
};
use touchlink::data::{generate_synthetic, SyntheticConfig};

fn main() -> anyhow::Result<()> {
    // Generation prompts are drawn from two shipped 16-prompt pools.
    let sentence_pool = PromptPool::shipped(Granularity::Sentence);
    let phrase_pool = PromptPool::shipped(Granularity::Phrase);
    println!(
        "pools: {} sentence prompts, {} phrase prompts",
        sentence_pool.prompts.len(),
        phrase_pool.prompts.len()
    );
    for i in 0..3 {
        println!("  draw {i}: {}", sample_prompt(&sentence_pool, 7, i)?);
    }

    // The filter on hand-written defects.
    println!("\npattern filter demos:");
    for text in [
        "a cool, smooth metal surface",
        "the surface feels \u{5149}\u{6ed1} and cool",
        "feels **very** smooth",
        "It feels rough. It feels rough.",
    ] {
        let report = pattern_filter(text);
        println!("  {:?} -> {:?} {:?}", text, report.verdict, report.defect_names());
    }

    // End to end over a corpus with injected defects.
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 64,
        corruption_rate: 0.25,
        ..Default::default()
    })?;
    let judge = judge_from_env();
    let outcome = curate(&manifest, &samples, judge.as_ref())?;
    println!(
        "\ncurated {} records with the '{}' judge: {} clean, {} queued for review",
        samples.len(),
        judge.name(),
        outcome.clean_ids.len(),
        outcome.queue.len()
    );
    for entry in outcome.queue.iter().take(3) {
        println!("  queued {} ({:?}): {}", entry.id, entry.defects, entry.rationale);
    }

    let path = std::env::temp_dir().join("touchlink_examples/correction_queue.jsonl");
    std::fs::create_dir_all(path.parent().unwrap())?;
    write_queue(&path, &outcome.queue)?;
    println!("queue written to {}", path.display());
    Ok(())
}
