//! Temperature-scaled contrastive objective.
//!
//! One-directional by default, exactly as the mix-over-text form is
//! written: each mixed representation is the anchor, all text features in
//! the batch are candidates. The symmetric variant adds the text-anchored
//! direction and is opt-in.

use ndarray::{Array2, Axis};

use super::{AlignError, EmbeddingBatch};

/// `-(1/K) * sum_i log( exp(x_i . y_i / tau) / sum_j exp(x_i . y_j / tau) )`
///
/// Both batches must be flagged normalized; computed with a log-sum-exp.
pub fn info_nce(x: &EmbeddingBatch, y: &EmbeddingBatch, tau: f64) -> Result<f64, AlignError> {
    check_inputs(x, y, tau)?;
    Ok(loss_from_rows(x.rows(), y.rows(), tau))
}

/// Mean of the two anchoring directions.
pub fn info_nce_symmetric(
    x: &EmbeddingBatch,
    y: &EmbeddingBatch,
    tau: f64,
) -> Result<f64, AlignError> {
    check_inputs(x, y, tau)?;
    let forward = loss_from_rows(x.rows(), y.rows(), tau);
    let backward = loss_from_rows(y.rows(), x.rows(), tau);
    Ok(0.5 * (forward + backward))
}

fn check_inputs(x: &EmbeddingBatch, y: &EmbeddingBatch, tau: f64) -> Result<(), AlignError> {
    if !x.is_normalized() || !y.is_normalized() {
        return Err(AlignError::Contract(
            "info_nce requires normalized embedding batches".into(),
        ));
    }
    if x.is_empty() {
        return Err(AlignError::Domain("info_nce needs at least one pair".into()));
    }
    if x.rows().dim() != y.rows().dim() {
        return Err(AlignError::Shape(format!(
            "x is {:?}, y is {:?}",
            x.rows().dim(),
            y.rows().dim()
        )));
    }
    if tau <= 0.0 || !tau.is_finite() {
        return Err(AlignError::Domain(format!("temperature must be positive, got {tau}")));
    }
    Ok(())
}

fn loss_from_rows(x: &Array2<f64>, y: &Array2<f64>, tau: f64) -> f64 {
    let k = x.nrows();
    let logits = x.dot(&y.t()) / tau;
    let mut total = 0.0;
    for (i, row) in logits.axis_iter(Axis(0)).enumerate() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        total += lse - row[i];
    }
    total / k as f64
}

/// Loss plus its gradient with respect to the anchor rows `x` (and, for the
/// symmetric variant, the contribution flowing back through the candidate
/// role of `x`). `y` is treated as constant — the text tower is frozen.
///
/// One-directional gradient: `dL/dX = (P - I) . Y / (K * tau)` with `P` the
/// row softmax of the scaled logits.
pub fn info_nce_grad(
    x: &Array2<f64>,
    y: &Array2<f64>,
    tau: f64,
    symmetric: bool,
) -> (f64, Array2<f64>) {
    let k = x.nrows();
    let scale = 1.0 / (k as f64 * tau);

    let logits = x.dot(&y.t()) / tau;
    let p = crate::nn::softmax_rows(&logits);
    let mut loss = 0.0;
    for (i, row) in logits.axis_iter(Axis(0)).enumerate() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += lse - row[i];
    }
    loss /= k as f64;
    let mut p_minus_i = p;
    for i in 0..k {
        p_minus_i[[i, i]] -= 1.0;
    }
    let mut dx = p_minus_i.dot(y) * scale;

    if symmetric {
        // Text-anchored direction: anchors are y rows, x rows are candidates.
        let logits_t = y.dot(&x.t()) / tau;
        let p_t = crate::nn::softmax_rows(&logits_t);
        let mut loss_t = 0.0;
        for (i, row) in logits_t.axis_iter(Axis(0)).enumerate() {
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            loss_t += lse - row[i];
        }
        loss_t /= k as f64;
        let mut pt_minus_i = p_t;
        for i in 0..k {
            pt_minus_i[[i, i]] -= 1.0;
        }
        let dx_t = pt_minus_i.t().dot(y) * scale;
        loss = 0.5 * (loss + loss_t);
        dx = (dx + dx_t) * 0.5;
    }
    (loss, dx)
}

/// Fraction of anchors whose highest-similarity candidate is their own
/// pair. The in-batch retrieval diagnostic used by overfit checks.
pub fn retrieval_top1(anchors: &Array2<f64>, candidates: &Array2<f64>) -> f64 {
    let k = anchors.nrows();
    if k == 0 {
        return 0.0;
    }
    let sims = anchors.dot(&candidates.t());
    let mut hits = 0usize;
    for i in 0..k {
        let row = sims.row(i);
        let mut best = 0usize;
        for j in 1..k {
            if row[j] > row[best] {
                best = j;
            }
        }
        if best == i {
            hits += 1;
        }
    }
    hits as f64 / k as f64
}
