//! Small dense-network toolkit: parameters, layers, and hand-written
//! backpropagation in `f64`.
//!
//! Nothing here is clever. Every layer exposes `forward` returning a cache
//! and `backward` consuming it, so gradients can be audited against finite
//! differences. Shapes are `ndarray::Array2<f64>` throughout; vectors ride
//! as `1×n` rows.

mod attention;
mod block;
mod linear;
mod norm;
mod optim;

pub use attention::{AdapterSites, AttentionCtx, MultiHeadAttention};
pub use block::{BlockCtx, Mlp, MlpCtx, TransformerBlock};
pub use linear::{Linear, LinearCtx, LoraAdapter};
pub use norm::{LayerNorm, LayerNormCtx};
pub use optim::AdamW;

use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// One named tensor with its gradient buffer and a freeze flag.
///
/// `trainable == false` means the optimizer never sees the tensor and the
/// backward passes skip accumulating into `grad`; the value must stay
/// bitwise identical for the lifetime of the model.
#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub value: Array2<f64>,
    pub grad: Array2<f64>,
    pub trainable: bool,
}

impl Param {
    pub fn new(name: impl Into<String>, value: Array2<f64>, trainable: bool) -> Self {
        let grad = Array2::zeros(value.raw_dim());
        Self { name: name.into(), value, grad, trainable }
    }

    pub fn zeros(name: impl Into<String>, rows: usize, cols: usize, trainable: bool) -> Self {
        Self::new(name, Array2::zeros((rows, cols)), trainable)
    }

    /// Seeded Gaussian init with the given standard deviation.
    pub fn randn(
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        std: f64,
        trainable: bool,
        rng: &mut impl Rng,
    ) -> Self {
        let dist = Normal::new(0.0, std).expect("std must be finite and positive");
        let value = Array2::from_shape_fn((rows, cols), |_| dist.sample(rng));
        Self::new(name, value, trainable)
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    pub fn numel(&self) -> usize {
        self.value.len()
    }

    /// Sum of squared gradient entries, for global-norm diagnostics.
    pub fn grad_sq_sum(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum: f64 = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Backward of row-wise softmax: `dx = p * (dy - rowsum(dy * p))`.
pub fn softmax_rows_backward(p: &Array2<f64>, dy: &Array2<f64>) -> Array2<f64> {
    let inner = (dy * p).sum_axis(Axis(1)).insert_axis(Axis(1));
    p * &(dy - &inner)
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
const GELU_A: f64 = 0.044_715;

/// GELU, tanh approximation. Smooth everywhere, which the finite-difference
/// gradient checks rely on.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

pub fn gelu_derivative(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    let du = GELU_C * (1.0 + 3.0 * GELU_A * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
}
