//! Low-rank adapters and the trainable/frozen parameter partition: the
//! touch tower trains fully, the vision tower trains only its adapter A/B
//! matrices, the text tower never trains.
//!
//! ```bash
//! cargo run --example lora_adapters
//! ```

use ndarray::{array, Array2};
use touchlink::encoders::{lora_forward, EncoderBundle, EncoderConfig, LoRAConfig};

fn main() -> anyhow::Result<()> {
    // The adapter arithmetic directly: base*x + (alpha/r) * B*(A*x).
    let base = array![[1.0, 0.0, 2.0], [0.0, 1.0, -1.0]];
    let a = array![[0.5, -0.5, 0.0]]; // r = 1
    let x = array![2.0, 1.0, 0.5];

    let b_zero = Array2::zeros((2, 1));
    let y0 = lora_forward(&base, &a, &b_zero, 8.0, &x)?;
    println!("B = 0:          y = {:?}  (equals base*x = {:?})", y0.to_vec(), base.dot(&x).to_vec());

    let b = array![[1.0], [-2.0]];
    let y1 = lora_forward(&base, &a, &b, 8.0, &x)?;
    let merged = &base + &(b.dot(&a) * 8.0);
    println!("B nonzero:      y = {:?}", y1.to_vec());
    println!("merged weight:  y = {:?}  (same result)", merged.dot(&x).to_vec());

    // The partition inside a full bundle.
    let mut bundle = EncoderBundle::new(EncoderConfig::default(), LoRAConfig::default(), 0.07, 7)?;
    let total: usize = bundle.all_parameters().iter().map(|p| p.numel()).sum();
    let frozen: usize = bundle
        .all_parameters()
        .iter()
        .filter(|p| !p.trainable)
        .map(|p| p.numel())
        .sum();
    let trainable_params = bundle.trainable_parameters();
    let trainable: usize = trainable_params.iter().map(|p| p.numel()).sum();
    println!("\nparameter partition:");
    println!("  total      {total:>8}");
    println!("  trainable  {trainable:>8}  (touch tower + adapter A/B)");
    println!("  frozen     {frozen:>8}  (vision base + text tower)");
    assert_eq!(trainable + frozen, total);

    println!("\nsample of trainable tensor names:");
    for p in trainable_params.iter().filter(|p| p.name.contains("lora")).take(4) {
        println!("  {} ({}x{})", p.name, p.value.nrows(), p.value.ncols());
    }
    Ok(())
}
