//! Adam with decoupled weight decay.

use std::collections::HashMap;

use ndarray::Array2;

use super::Param;

#[derive(Debug, Clone)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    step: u64,
    moments: HashMap<String, (Array2<f64>, Array2<f64>)>,
}

impl AdamW {
    pub fn new(beta1: f64, beta2: f64, weight_decay: f64) -> Self {
        Self { beta1, beta2, eps: 1e-8, weight_decay, step: 0, moments: HashMap::new() }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update over the given parameters. Frozen tensors are rejected
    /// outright: the caller must hand the optimizer the trainable set only.
    pub fn step(&mut self, params: &mut [&mut Param], lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for p in params.iter_mut() {
            assert!(p.trainable, "optimizer received frozen parameter {}", p.name);
            let (m, v) = self
                .moments
                .entry(p.name.clone())
                .or_insert_with(|| (Array2::zeros(p.value.raw_dim()), Array2::zeros(p.value.raw_dim())));
            azip(m, v, &p.grad, &mut p.value, self.beta1, self.beta2, bc1, bc2, self.eps, lr, self.weight_decay);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn azip(
    m: &mut Array2<f64>,
    v: &mut Array2<f64>,
    grad: &Array2<f64>,
    value: &mut Array2<f64>,
    beta1: f64,
    beta2: f64,
    bc1: f64,
    bc2: f64,
    eps: f64,
    lr: f64,
    weight_decay: f64,
) {
    ndarray::Zip::from(value)
        .and(m)
        .and(v)
        .and(grad)
        .for_each(|w, m, v, &g| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *w -= lr * (m_hat / (v_hat.sqrt() + eps) + weight_decay * *w);
        });
}
