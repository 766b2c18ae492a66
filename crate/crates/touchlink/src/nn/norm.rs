//! Row-wise layer normalization with affine parameters.

use ndarray::{Array1, Array2, Axis};

use super::Param;

const LN_EPS: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct LayerNorm {
    pub gamma: Param, // 1×w
    pub beta: Param,  // 1×w
}

pub struct LayerNormCtx {
    x_hat: Array2<f64>,
    inv_std: Array1<f64>,
}

impl LayerNorm {
    pub fn new(name: &str, width: usize, trainable: bool) -> Self {
        Self {
            gamma: Param::new(format!("{name}.gamma"), Array2::ones((1, width)), trainable),
            beta: Param::zeros(format!("{name}.beta"), 1, width, trainable),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, LayerNormCtx) {
        let w = x.ncols() as f64;
        let mean = x.mean_axis(Axis(1)).expect("non-empty rows");
        let mut x_hat = x - &mean.clone().insert_axis(Axis(1));
        let var = x_hat.mapv(|v| v * v).sum_axis(Axis(1)) / w;
        let inv_std = var.mapv(|v| 1.0 / (v + LN_EPS).sqrt());
        x_hat *= &inv_std.clone().insert_axis(Axis(1));
        let y = &x_hat * &self.gamma.value + &self.beta.value;
        (y, LayerNormCtx { x_hat, inv_std })
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        self.forward(x).0
    }

    pub fn backward(&mut self, ctx: &LayerNormCtx, dy: &Array2<f64>) -> Array2<f64> {
        let w = dy.ncols() as f64;
        if self.gamma.trainable {
            self.gamma.grad += &(dy * &ctx.x_hat).sum_axis(Axis(0)).insert_axis(Axis(0));
        }
        if self.beta.trainable {
            self.beta.grad += &dy.sum_axis(Axis(0)).insert_axis(Axis(0));
        }
        let g = dy * &self.gamma.value;
        let mean_g = (g.sum_axis(Axis(1)) / w).insert_axis(Axis(1));
        let mean_gx = ((&g * &ctx.x_hat).sum_axis(Axis(1)) / w).insert_axis(Axis(1));
        let mut dx = &g - &mean_g - &(&ctx.x_hat * &mean_gx);
        dx *= &ctx.inv_std.clone().insert_axis(Axis(1));
        dx
    }

    pub fn params(&self) -> Vec<&Param> {
        vec![&self.gamma, &self.beta]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        vec![&mut self.gamma, &mut self.beta]
    }
}
