//! Affine map with an optional low-rank adapter on the weight.

use ndarray::{Array2, Axis};
use rand::Rng;

use super::Param;

/// Low-rank delta `scale * B·A` added to a frozen base weight.
///
/// `a` is `r×in`, `b` is `out×r`, `scale = alpha / r`. `b` starts at zero so
/// the adapted forward equals the base forward until the first update.
#[derive(Debug, Clone)]
pub struct LoraAdapter {
    pub a: Param,
    pub b: Param,
    pub scale: f64,
}

impl LoraAdapter {
    pub fn new(
        name: &str,
        in_dim: usize,
        out_dim: usize,
        rank: usize,
        alpha: f64,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            a: Param::randn(format!("{name}.lora_a"), rank, in_dim, 1e-2, true, rng),
            b: Param::zeros(format!("{name}.lora_b"), out_dim, rank, true),
            scale: alpha / rank as f64,
        }
    }
}

/// `y = x·Wᵀ + bias (+ scale·(x·Aᵀ)·Bᵀ)` over row-major batches.
#[derive(Debug, Clone)]
pub struct Linear {
    pub weight: Param, // out×in
    pub bias: Param,   // 1×out
    pub adapter: Option<LoraAdapter>,
}

/// Activations the backward pass needs.
pub struct LinearCtx {
    x: Array2<f64>,
    lora_hidden: Option<Array2<f64>>, // x·Aᵀ, n×r
}

impl Linear {
    pub fn new(name: &str, in_dim: usize, out_dim: usize, trainable: bool, rng: &mut impl Rng) -> Self {
        // 1/sqrt(in) keeps activations O(1) through the stack.
        let std = 1.0 / (in_dim as f64).sqrt();
        Self {
            weight: Param::randn(format!("{name}.weight"), out_dim, in_dim, std, trainable, rng),
            bias: Param::zeros(format!("{name}.bias"), 1, out_dim, trainable),
            adapter: None,
        }
    }

    pub fn with_adapter(mut self, adapter: LoraAdapter) -> Self {
        self.adapter = Some(adapter);
        self
    }

    pub fn in_dim(&self) -> usize {
        self.weight.value.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.value.nrows()
    }

    /// Effective weight with any adapter delta merged in.
    pub fn merged_weight(&self) -> Array2<f64> {
        match &self.adapter {
            None => self.weight.value.clone(),
            Some(ad) => &self.weight.value + &(ad.b.value.dot(&ad.a.value) * ad.scale),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, LinearCtx) {
        debug_assert_eq!(x.ncols(), self.in_dim(), "{}: input width", self.weight.name);
        let mut y = x.dot(&self.weight.value.t());
        y += &self.bias.value;
        let lora_hidden = self.adapter.as_ref().map(|ad| {
            let h = x.dot(&ad.a.value.t());
            y += &(h.dot(&ad.b.value.t()) * ad.scale);
            h
        });
        (y, LinearCtx { x: x.clone(), lora_hidden })
    }

    /// Inference-only forward that skips caching.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = x.dot(&self.weight.value.t());
        y += &self.bias.value;
        if let Some(ad) = &self.adapter {
            y += &(x.dot(&ad.a.value.t()).dot(&ad.b.value.t()) * ad.scale);
        }
        y
    }

    /// Accumulates parameter gradients (trainable tensors only) and returns
    /// the gradient with respect to the input.
    pub fn backward(&mut self, ctx: &LinearCtx, dy: &Array2<f64>) -> Array2<f64> {
        if self.weight.trainable {
            self.weight.grad += &dy.t().dot(&ctx.x);
        }
        if self.bias.trainable {
            self.bias.grad += &dy.sum_axis(Axis(0)).insert_axis(Axis(0));
        }
        let mut dx = dy.dot(&self.weight.value);
        if let Some(ad) = &mut self.adapter {
            let h = ctx.lora_hidden.as_ref().expect("adapter forward caches the hidden product");
            let dy_b = dy.dot(&ad.b.value); // n×r
            if ad.a.trainable {
                ad.a.grad += &(dy_b.t().dot(&ctx.x) * ad.scale);
            }
            if ad.b.trainable {
                ad.b.grad += &(dy.t().dot(h) * ad.scale);
            }
            dx += &(dy_b.dot(&ad.a.value) * ad.scale);
        }
        dx
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = vec![&self.weight, &self.bias];
        if let Some(ad) = &self.adapter {
            out.push(&ad.a);
            out.push(&ad.b);
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = vec![&mut self.weight, &mut self.bias];
        if let Some(ad) = &mut self.adapter {
            out.push(&mut ad.a);
            out.push(&mut ad.b);
        }
        out
    }
}
