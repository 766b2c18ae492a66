//! Pre-norm transformer block: `x + attn(ln1(x))`, then `y + mlp(ln2(y))`.

use ndarray::Array2;
use rand::Rng;

use super::attention::AdapterSites;
use super::{gelu, gelu_derivative, AttentionCtx, LayerNorm, LayerNormCtx, Linear, LinearCtx, MultiHeadAttention, Param};

#[derive(Debug, Clone)]
pub struct Mlp {
    pub fc1: Linear,
    pub fc2: Linear,
}

pub struct MlpCtx {
    fc1_ctx: LinearCtx,
    fc2_ctx: LinearCtx,
    pre_act: Array2<f64>,
}

impl Mlp {
    pub fn new(name: &str, width: usize, hidden: usize, trainable: bool, rng: &mut impl Rng) -> Self {
        Self {
            fc1: Linear::new(&format!("{name}.fc1"), width, hidden, trainable, rng),
            fc2: Linear::new(&format!("{name}.fc2"), hidden, width, trainable, rng),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, MlpCtx) {
        let (pre_act, fc1_ctx) = self.fc1.forward(x);
        let hidden = pre_act.mapv(gelu);
        let (y, fc2_ctx) = self.fc2.forward(&hidden);
        (y, MlpCtx { fc1_ctx, fc2_ctx, pre_act })
    }

    pub fn backward(&mut self, ctx: &MlpCtx, dy: &Array2<f64>) -> Array2<f64> {
        let d_hidden = self.fc2.backward(&ctx.fc2_ctx, dy);
        let d_pre = &d_hidden * &ctx.pre_act.mapv(gelu_derivative);
        self.fc1.backward(&ctx.fc1_ctx, &d_pre)
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = self.fc1.params();
        out.extend(self.fc2.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.fc1.params_mut();
        out.extend(self.fc2.params_mut());
        out
    }
}

#[derive(Debug, Clone)]
pub struct TransformerBlock {
    pub ln1: LayerNorm,
    pub attn: MultiHeadAttention,
    pub ln2: LayerNorm,
    pub mlp: Mlp,
}

pub struct BlockCtx {
    ln1_ctx: LayerNormCtx,
    attn_ctx: AttentionCtx,
    ln2_ctx: LayerNormCtx,
    mlp_ctx: MlpCtx,
}

impl TransformerBlock {
    pub fn new(
        name: &str,
        width: usize,
        heads: usize,
        trainable: bool,
        adapters: Option<(AdapterSites, usize, f64)>,
        residual_scale: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let mut attn =
            MultiHeadAttention::new(&format!("{name}.attn"), width, heads, trainable, adapters, rng);
        let mut mlp = Mlp::new(&format!("{name}.mlp"), width, 4 * width, trainable, rng);
        // Scale the projections feeding the residual stream so stacked
        // blocks keep activations near the embedding scale at init.
        attn.output.weight.value *= residual_scale;
        mlp.fc2.weight.value *= residual_scale;
        Self {
            ln1: LayerNorm::new(&format!("{name}.ln1"), width, trainable),
            attn,
            ln2: LayerNorm::new(&format!("{name}.ln2"), width, trainable),
            mlp,
        }
    }

    pub fn forward(&self, x: &Array2<f64>, tokens: usize) -> (Array2<f64>, BlockCtx) {
        let (n1, ln1_ctx) = self.ln1.forward(x);
        let (a, attn_ctx) = self.attn.forward(&n1, tokens);
        let y1 = x + &a;
        let (n2, ln2_ctx) = self.ln2.forward(&y1);
        let (m, mlp_ctx) = self.mlp.forward(&n2);
        let y = &y1 + &m;
        (y, BlockCtx { ln1_ctx, attn_ctx, ln2_ctx, mlp_ctx })
    }

    pub fn backward(&mut self, ctx: &BlockCtx, dy: &Array2<f64>) -> Array2<f64> {
        let d_mlp_in = self.mlp.backward(&ctx.mlp_ctx, dy);
        let dy1 = dy + &self.ln2.backward(&ctx.ln2_ctx, &d_mlp_in);
        let d_attn_in = self.attn.backward(&ctx.attn_ctx, &dy1);
        &dy1 + &self.ln1.backward(&ctx.ln1_ctx, &d_attn_in)
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = self.ln1.params();
        out.extend(self.attn.params());
        out.extend(self.ln2.params());
        out.extend(self.mlp.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.ln1.params_mut();
        out.extend(self.attn.params_mut());
        out.extend(self.ln2.params_mut());
        out.extend(self.mlp.params_mut());
        out
    }
}
