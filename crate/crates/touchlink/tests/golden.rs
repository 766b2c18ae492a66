//! Golden-value regression tests for the encoders and the training loop.
//!
//! The reference values were recorded from the first verified build (after
//! the finite-difference gradient checks passed) and live under
//! `tests/golden/`. Re-record deliberately with:
//!
//! ```bash
//! TOUCHLINK_BLESS=1 cargo test --test golden
//! ```

use std::path::PathBuf;

use touchlink::alignment::{train, TrainConfig};
use touchlink::data::{generate_synthetic, SyntheticConfig};
use touchlink::encoders::{encode_image, encode_text, EncoderBundle, EncoderConfig, LoRAConfig};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare against the stored golden values, or re-record them when
/// `TOUCHLINK_BLESS` is set. Tolerance is relative, wide enough only for
/// cross-machine rounding differences.
fn check_or_bless(name: &str, values: &[f64]) {
    let path = golden_path(name);
    if std::env::var("TOUCHLINK_BLESS").is_ok() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(values).unwrap()).unwrap();
        return;
    }
    let body = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {} ({e}); record with TOUCHLINK_BLESS=1", path.display()));
    let expected: Vec<f64> = serde_json::from_str(&body).unwrap();
    assert_eq!(values.len(), expected.len(), "{name}: length changed");
    for (i, (got, want)) in values.iter().zip(&expected).enumerate() {
        let tol = 1e-10 * want.abs().max(1.0);
        assert!(
            (got - want).abs() <= tol,
            "{name}[{i}]: got {got}, golden {want}"
        );
    }
}

fn golden_bundle() -> EncoderBundle {
    let config = EncoderConfig {
        image_size: 32,
        patch_size: 8,
        depth: 2,
        width: 32,
        heads: 4,
        embed_dim: 16,
        vocab_size: 1024,
        max_text_len: 24,
    };
    EncoderBundle::new(config, LoRAConfig::default(), 0.07, 42).unwrap()
}

#[test]
fn touch_encoder_matches_golden_vector() {
    let bundle = golden_bundle();
    let (_, samples) =
        generate_synthetic(&SyntheticConfig { samples: 4, ..Default::default() }).unwrap();
    let emb = encode_image(&bundle.touch, &[&samples[0].touch_image], true).unwrap();
    let row: Vec<f64> = emb.rows().row(0).to_vec();
    check_or_bless("touch_embedding.json", &row);
}

#[test]
fn text_encoder_matches_golden_vector() {
    let bundle = golden_bundle();
    let emb = encode_text(&bundle.text, &["a cold, polished metal plate under the fingertips"])
        .unwrap();
    let row: Vec<f64> = emb.rows().row(0).to_vec();
    check_or_bless("text_embedding.json", &row);
}

#[test]
fn ten_step_loss_trajectory_matches_golden() {
    let (manifest, samples) = generate_synthetic(&SyntheticConfig {
        samples: 16,
        height: 32,
        width: 32,
        seed: 7,
        ..Default::default()
    })
    .unwrap();
    let mut bundle = golden_bundle();
    let config = TrainConfig {
        batch_size: 4,
        epochs: 5, // 12 train samples / batch 4 = 3 steps per epoch
        base_lr: 1e-3,
        warmup_steps: 4,
        temperature: 0.07,
        seed: 7,
        ..Default::default()
    };
    let out = train(&mut bundle, &manifest, &samples, &config).unwrap();
    let losses: Vec<f64> = out.metrics.iter().take(10).map(|m| m.loss).collect();
    assert_eq!(losses.len(), 10);
    check_or_bless("loss_trajectory.json", &losses);
}
