//! Linear probing: a multinomial logistic-regression head fit on frozen
//! embeddings with deterministic full-batch optimization.

use ndarray::{Array1, Array2, Axis};

use super::{split_samples, touch_embeddings, EvalError, EvalReport, Protocol, TaskKind};
use crate::data::{DatasetManifest, Sample};
use crate::encoders::EncoderBundle;

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    /// L2 penalty on the weights (not the bias); keeps separable problems
    /// bounded so the gradient tolerance is reachable.
    pub l2: f64,
    /// Stop when the gradient norm falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { l2: 1e-4, grad_tol: 1e-6, max_iters: 50_000 }
    }
}

/// Fitted softmax-regression head.
#[derive(Debug, Clone)]
pub struct LinearProbe {
    pub weights: Array2<f64>, // classes x d
    pub bias: Array1<f64>,
    pub iterations: usize,
    pub final_grad_norm: f64,
}

impl LinearProbe {
    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        let logits = x.dot(&self.weights.t()) + &self.bias;
        logits
            .axis_iter(Axis(0))
            .map(|row| {
                let mut best = 0;
                for c in 1..row.len() {
                    if row[c] > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    pub fn accuracy(&self, x: &Array2<f64>, labels: &[usize]) -> f64 {
        let preds = self.predict(x);
        let hits = preds.iter().zip(labels).filter(|(p, t)| p == t).count();
        hits as f64 / labels.len().max(1) as f64
    }
}

fn loss_and_grad(
    x: &Array2<f64>,
    labels: &[usize],
    w: &Array2<f64>,
    b: &Array1<f64>,
    l2: f64,
) -> (f64, Array2<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    let logits = x.dot(&w.t()) + b;
    let probs = crate::nn::softmax_rows(&logits);
    let mut loss = 0.0;
    let mut delta = probs;
    for (i, &y) in labels.iter().enumerate() {
        loss -= delta[[i, y]].max(1e-300).ln();
        delta[[i, y]] -= 1.0;
    }
    loss = loss / n + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    let gw = delta.t().dot(x) / n + &(w * l2);
    let gb = delta.sum_axis(Axis(0)) / n;
    (loss, gw, gb)
}

/// Full-batch gradient descent with backtracking line search. Deterministic:
/// zero init, fixed shrink factor, fixed tolerance.
pub fn fit_linear_probe(
    x: &Array2<f64>,
    labels: &[usize],
    classes: usize,
    opts: &ProbeOptions,
) -> Result<LinearProbe, EvalError> {
    if x.nrows() != labels.len() {
        return Err(EvalError::Validation(format!(
            "{} embeddings vs {} labels",
            x.nrows(),
            labels.len()
        )));
    }
    if x.nrows() == 0 {
        return Err(EvalError::Degenerate("empty training split".into()));
    }
    let distinct: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(EvalError::Degenerate(format!(
            "training split holds a single class ({:?}); the probe cannot fit",
            distinct
        )));
    }
    if let Some(&max) = distinct.iter().max() {
        if max >= classes {
            return Err(EvalError::Validation(format!(
                "label {max} out of range for {classes} classes"
            )));
        }
    }

    let d = x.ncols();
    let mut w = Array2::<f64>::zeros((classes, d));
    let mut b = Array1::<f64>::zeros(classes);
    let (mut loss, mut gw, mut gb) = loss_and_grad(x, labels, &w, &b, opts.l2);
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut grad_norm = (gw.iter().map(|v| v * v).sum::<f64>()
        + gb.iter().map(|v| v * v).sum::<f64>())
    .sqrt();
    while grad_norm > opts.grad_tol && iterations < opts.max_iters {
        // Backtracking Armijo search from a slightly grown previous step.
        step = (step * 1.5).min(1e3);
        let g2 = grad_norm * grad_norm;
        loop {
            let w_try = &w - &(&gw * step);
            let b_try = &b - &(&gb * step);
            let (loss_try, gw_try, gb_try) = loss_and_grad(x, labels, &w_try, &b_try, opts.l2);
            if loss_try <= loss - 1e-4 * step * g2 || step < 1e-12 {
                w = w_try;
                b = b_try;
                loss = loss_try;
                gw = gw_try;
                gb = gb_try;
                break;
            }
            step *= 0.5;
        }
        grad_norm = (gw.iter().map(|v| v * v).sum::<f64>()
            + gb.iter().map(|v| v * v).sum::<f64>())
        .sqrt();
        iterations += 1;
    }
    Ok(LinearProbe { weights: w, bias: b, iterations, final_grad_norm: grad_norm })
}

/// The full protocol: embed both splits with the frozen touch encoder, fit
/// the head on the train split, report test accuracy and confusion.
pub fn linear_probe_report(
    bundle: &EncoderBundle,
    manifest: &DatasetManifest,
    samples: &[Sample],
    task: TaskKind,
    train_split: &str,
    eval_split: &str,
    checkpoint: &str,
    seed: u64,
) -> Result<(EvalReport, LinearProbe), EvalError> {
    let classes = task.class_names(manifest).len();
    let train = split_samples(manifest, samples, train_split)?;
    let eval = split_samples(manifest, samples, eval_split)?;
    let x_train = touch_embeddings(bundle, &train, task)?;
    let y_train: Vec<usize> =
        train.iter().map(|s| task.label_of(s)).collect::<Result<_, _>>()?;
    let x_eval = touch_embeddings(bundle, &eval, task)?;
    let y_eval: Vec<usize> = eval.iter().map(|s| task.label_of(s)).collect::<Result<_, _>>()?;

    let probe = fit_linear_probe(&x_train, &y_train, classes, &ProbeOptions::default())?;
    let preds = probe.predict(&x_eval);
    let confusion = EvalReport::tally(classes, y_eval.into_iter().zip(preds));
    let report = EvalReport::from_confusion(
        task,
        Protocol::LinearProbe,
        confusion,
        checkpoint,
        eval_split,
        seed,
    );
    Ok((report, probe))
}
