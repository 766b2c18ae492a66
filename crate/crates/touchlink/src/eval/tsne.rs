//! Seeded stochastic-neighbor-embedding projection to 2-D, with CSV and
//! scatter-plot export.
//!
//! Exact (quadratic) implementation: fine for desk-scale sample counts.
//! Initial positions are drawn from a stream keyed by the seed and a hash
//! of each input row, so identical rows start — and stay — coincident, and
//! the whole trajectory is reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use ndarray::{Array1, Array2, Axis};
use rand_distr::{Distribution, Normal};

use super::EvalError;
use crate::util::{fnv1a, rng_for};

#[derive(Debug, Clone, Copy)]
pub struct TsneOptions {
    /// Target perplexity; clamped to (n-1)/3 internally.
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    /// Multiplier on P during the early iterations.
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneOptions {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 500,
            learning_rate: 100.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 100,
            seed: 0,
        }
    }
}

fn squared_distances(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows();
    let sq: Array1<f64> = x.map_axis(Axis(1), |r| r.dot(&r));
    let mut d2 = -2.0 * x.dot(&x.t());
    for i in 0..n {
        for j in 0..n {
            d2[[i, j]] += sq[i] + sq[j];
            if d2[[i, j]] < 0.0 {
                d2[[i, j]] = 0.0;
            }
        }
    }
    d2
}

/// Binary search the per-row precision so the conditional distribution hits
/// the target perplexity.
fn conditional_p(d2: &Array2<f64>, perplexity: f64) -> Array2<f64> {
    let n = d2.nrows();
    let target_entropy = perplexity.ln();
    let mut p = Array2::zeros((n, n));
    for i in 0..n {
        let (mut beta, mut beta_lo, mut beta_hi) = (1.0f64, f64::NEG_INFINITY, f64::INFINITY);
        for _ in 0..64 {
            let mut sum = 0.0;
            let mut weighted = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let w = (-beta * d2[[i, j]]).exp();
                sum += w;
                weighted += w * d2[[i, j]];
            }
            if sum <= 0.0 {
                break;
            }
            // H = ln(sum) + beta * E[d2]
            let entropy = sum.ln() + beta * weighted / sum;
            if (entropy - target_entropy).abs() < 1e-5 {
                break;
            }
            if entropy > target_entropy {
                beta_lo = beta;
                beta = if beta_hi.is_finite() { 0.5 * (beta + beta_hi) } else { beta * 2.0 };
            } else {
                beta_hi = beta;
                beta = if beta_lo.is_finite() { 0.5 * (beta + beta_lo) } else { beta * 0.5 };
            }
        }
        let mut sum = 0.0;
        for j in 0..n {
            if j != i {
                let w = (-beta * d2[[i, j]]).exp();
                p[[i, j]] = w;
                sum += w;
            }
        }
        if sum > 0.0 {
            for j in 0..n {
                p[[i, j]] /= sum;
            }
        }
    }
    p
}

/// Project `n x d` embeddings to `n x 2`. Deterministic given the seed.
pub fn project_2d(embeddings: &Array2<f64>, opts: &TsneOptions) -> Result<Array2<f64>, EvalError> {
    let n = embeddings.nrows();
    if n < 10 {
        return Err(EvalError::Validation(format!(
            "projection needs at least 10 rows, got {n}"
        )));
    }
    let perplexity = opts.perplexity.min((n as f64 - 1.0) / 3.0).max(2.0);
    let d2 = squared_distances(embeddings);
    let cond = conditional_p(&d2, perplexity);
    let mut p = (&cond + &cond.t()) / (2.0 * n as f64);
    p.mapv_inplace(|v| v.max(1e-12));

    // Row-hash keyed init: identical input rows share a starting point and
    // identical dynamics, so they remain coincident.
    let noise = Normal::new(0.0, 1e-4).expect("valid");
    let mut y = Array2::zeros((n, 2));
    for i in 0..n {
        let mut bytes = Vec::with_capacity(embeddings.ncols() * 8);
        for v in embeddings.row(i) {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        let mut rng = rng_for(opts.seed ^ fnv1a(&bytes), "eval.tsne.init");
        y[[i, 0]] = noise.sample(&mut rng);
        y[[i, 1]] = noise.sample(&mut rng);
    }

    let mut velocity = Array2::<f64>::zeros((n, 2));
    let mut gains = Array2::<f64>::ones((n, 2));
    for iter in 0..opts.iterations {
        let exaggeration = if iter < opts.exaggeration_iters { opts.early_exaggeration } else { 1.0 };
        let momentum = if iter < 250 { 0.5 } else { 0.8 };

        // Student-t affinities in the plane.
        let mut w = Array2::<f64>::zeros((n, n));
        let mut w_sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dx = y[[i, 0]] - y[[j, 0]];
                let dy = y[[i, 1]] - y[[j, 1]];
                let v = 1.0 / (1.0 + dx * dx + dy * dy);
                w[[i, j]] = v;
                w_sum += v;
            }
        }
        let w_sum = w_sum.max(1e-12);

        let mut grad = Array2::<f64>::zeros((n, 2));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = (w[[i, j]] / w_sum).max(1e-12);
                let mult = (exaggeration * p[[i, j]] - q) * w[[i, j]];
                grad[[i, 0]] += 4.0 * mult * (y[[i, 0]] - y[[j, 0]]);
                grad[[i, 1]] += 4.0 * mult * (y[[i, 1]] - y[[j, 1]]);
            }
        }
        for i in 0..n {
            for c in 0..2 {
                let same_sign = grad[[i, c]].signum() == velocity[[i, c]].signum();
                gains[[i, c]] = if same_sign {
                    (gains[[i, c]] * 0.8).max(0.01)
                } else {
                    gains[[i, c]] + 0.2
                };
                velocity[[i, c]] =
                    momentum * velocity[[i, c]] - opts.learning_rate * gains[[i, c]] * grad[[i, c]];
                y[[i, c]] += velocity[[i, c]];
            }
        }
        // Re-center to keep coordinates bounded.
        let mean = y.mean_axis(Axis(0)).expect("non-empty");
        for i in 0..n {
            y[[i, 0]] -= mean[0];
            y[[i, 1]] -= mean[1];
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::Degenerate("projection diverged".into()));
    }
    Ok(y)
}

fn class_color(class: usize, classes: usize) -> Rgb<u8> {
    let h = class as f64 * 360.0 / classes.max(1) as f64;
    let s = 0.75;
    let v = 0.85;
    let c = v * s;
    let hp = (h % 360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    Rgb([
        ((r + m) * 255.0) as u8,
        ((g + m) * 255.0) as u8,
        ((b + m) * 255.0) as u8,
    ])
}

/// Write `<stem>.csv` (id,label,x,y) and `<stem>.png` (scatter colored by
/// label). Returns the two paths.
pub fn write_projection(
    stem: &Path,
    ids: &[String],
    labels: &[usize],
    classes: usize,
    coords: &Array2<f64>,
) -> Result<(PathBuf, PathBuf), EvalError> {
    let csv_path = stem.with_extension("csv");
    let png_path = stem.with_extension("png");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(f, "id,label,x,y")?;
    for i in 0..coords.nrows() {
        writeln!(f, "{},{},{},{}", ids[i], labels[i], coords[[i, 0]], coords[[i, 1]])?;
    }
    f.flush()?;

    let size = 640u32;
    let pad = 24.0;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..coords.nrows() {
        min_x = min_x.min(coords[[i, 0]]);
        max_x = max_x.max(coords[[i, 0]]);
        min_y = min_y.min(coords[[i, 1]]);
        max_y = max_y.max(coords[[i, 1]]);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let mut img = RgbImage::from_pixel(size, size, Rgb([255, 255, 255]));
    for i in 0..coords.nrows() {
        let px = pad + (coords[[i, 0]] - min_x) / span_x * (size as f64 - 2.0 * pad);
        let py = pad + (coords[[i, 1]] - min_y) / span_y * (size as f64 - 2.0 * pad);
        let color = class_color(labels[i], classes);
        for dy in -2i32..=2 {
            for dx in -2i32..=2 {
                let x = (px as i32 + dx).clamp(0, size as i32 - 1) as u32;
                let y = (py as i32 + dy).clamp(0, size as i32 - 1) as u32;
                img.put_pixel(x, y, color);
            }
        }
    }
    img.save(&png_path)
        .map_err(|e| EvalError::Validation(format!("plot write failed: {e}")))?;
    Ok((csv_path, png_path))
}
