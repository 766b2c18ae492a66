//! Multi-head self-attention over fixed-length token blocks.
//!
//! The token batch is a single `(images·tokens)×width` matrix; attention is
//! confined to each image's contiguous block of rows, so the projections run
//! as one large matmul while the score computation loops per image and head.

use ndarray::{s, Array2};
use rand::Rng;

use super::{softmax_rows, softmax_rows_backward, Linear, LinearCtx, LoraAdapter, Param};

#[derive(Debug, Clone)]
pub struct MultiHeadAttention {
    pub query: Linear,
    pub key: Linear,
    pub value: Linear,
    pub output: Linear,
    pub heads: usize,
}

pub struct AttentionCtx {
    q_ctx: LinearCtx,
    k_ctx: LinearCtx,
    v_ctx: LinearCtx,
    o_ctx: LinearCtx,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    // Softmax probabilities, one `tokens×tokens` matrix per (image, head).
    probs: Vec<Array2<f64>>,
    tokens: usize,
}

/// Which projections carry low-rank adapters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdapterSites {
    pub query: bool,
    pub value: bool,
}

impl MultiHeadAttention {
    pub fn new(
        name: &str,
        width: usize,
        heads: usize,
        trainable: bool,
        adapters: Option<(AdapterSites, usize, f64)>,
        rng: &mut impl Rng,
    ) -> Self {
        assert!(width % heads == 0, "width must divide into heads");
        let mut query = Linear::new(&format!("{name}.query"), width, width, trainable, rng);
        let key = Linear::new(&format!("{name}.key"), width, width, trainable, rng);
        let mut value = Linear::new(&format!("{name}.value"), width, width, trainable, rng);
        let output = Linear::new(&format!("{name}.output"), width, width, trainable, rng);
        if let Some((sites, rank, alpha)) = adapters {
            if sites.query {
                query = query.with_adapter(LoraAdapter::new(
                    &format!("{name}.query"),
                    width,
                    width,
                    rank,
                    alpha,
                    rng,
                ));
            }
            if sites.value {
                value = value.with_adapter(LoraAdapter::new(
                    &format!("{name}.value"),
                    width,
                    width,
                    rank,
                    alpha,
                    rng,
                ));
            }
        }
        Self { query, key, value, output, heads }
    }

    pub fn width(&self) -> usize {
        self.query.in_dim()
    }

    /// `x` is `(images·tokens)×width`; `tokens` rows per image.
    pub fn forward(&self, x: &Array2<f64>, tokens: usize) -> (Array2<f64>, AttentionCtx) {
        let width = self.width();
        let head_dim = width / self.heads;
        let scale = 1.0 / (head_dim as f64).sqrt();
        let images = x.nrows() / tokens;
        debug_assert_eq!(images * tokens, x.nrows());

        let (q, q_ctx) = self.query.forward(x);
        let (k, k_ctx) = self.key.forward(x);
        let (v, v_ctx) = self.value.forward(x);

        let mut context = Array2::zeros((x.nrows(), width));
        let mut probs = Vec::with_capacity(images * self.heads);
        for img in 0..images {
            let rows = img * tokens..(img + 1) * tokens;
            for h in 0..self.heads {
                let cols = h * head_dim..(h + 1) * head_dim;
                let qh = q.slice(s![rows.clone(), cols.clone()]);
                let kh = k.slice(s![rows.clone(), cols.clone()]);
                let vh = v.slice(s![rows.clone(), cols.clone()]);
                let scores = qh.dot(&kh.t()) * scale;
                let p = softmax_rows(&scores);
                context
                    .slice_mut(s![rows.clone(), cols.clone()])
                    .assign(&p.dot(&vh));
                probs.push(p);
            }
        }
        let (out, o_ctx) = self.output.forward(&context);
        (out, AttentionCtx { q_ctx, k_ctx, v_ctx, o_ctx, q, k, v, probs, tokens })
    }

    pub fn backward(&mut self, ctx: &AttentionCtx, dy: &Array2<f64>) -> Array2<f64> {
        let width = self.width();
        let head_dim = width / self.heads;
        let scale = 1.0 / (head_dim as f64).sqrt();
        let tokens = ctx.tokens;
        let images = dy.nrows() / tokens;

        let d_context = self.output.backward(&ctx.o_ctx, dy);
        let mut dq = Array2::zeros((dy.nrows(), width));
        let mut dk = Array2::zeros((dy.nrows(), width));
        let mut dv = Array2::zeros((dy.nrows(), width));
        for img in 0..images {
            let rows = img * tokens..(img + 1) * tokens;
            for h in 0..self.heads {
                let cols = h * head_dim..(h + 1) * head_dim;
                let p = &ctx.probs[img * self.heads + h];
                let qh = ctx.q.slice(s![rows.clone(), cols.clone()]);
                let kh = ctx.k.slice(s![rows.clone(), cols.clone()]);
                let vh = ctx.v.slice(s![rows.clone(), cols.clone()]);
                let d_ctx_h = d_context.slice(s![rows.clone(), cols.clone()]);

                let dp = d_ctx_h.dot(&vh.t());
                let ds = softmax_rows_backward(p, &dp) * scale;
                dq.slice_mut(s![rows.clone(), cols.clone()])
                    .assign(&ds.dot(&kh));
                dk.slice_mut(s![rows.clone(), cols.clone()])
                    .assign(&ds.t().dot(&qh));
                dv.slice_mut(s![rows.clone(), cols.clone()])
                    .assign(&p.t().dot(&d_ctx_h));
            }
        }
        let mut dx = self.query.backward(&ctx.q_ctx, &dq);
        dx += &self.key.backward(&ctx.k_ctx, &dk);
        dx += &self.value.backward(&ctx.v_ctx, &dv);
        dx
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = self.query.params();
        out.extend(self.key.params());
        out.extend(self.value.params());
        out.extend(self.output.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.query.params_mut();
        out.extend(self.key.params_mut());
        out.extend(self.value.params_mut());
        out.extend(self.output.params_mut());
        out
    }
}
