//! Toy vision transformer over square RGB images: patch embedding, learned
//! positions, pre-norm blocks, mean pooling, and a projection head. The
//! same tower serves touch and vision; tactile frames are plain RGB input.

use image::RgbImage;
use ndarray::{s, Array2, Axis};

use super::{EncoderConfig, EncoderError, LoRAConfig};
use crate::nn::{
    BlockCtx, LayerNorm, LayerNormCtx, Linear, LinearCtx, Param, TransformerBlock,
};
use crate::util::rng_for;

#[derive(Debug, Clone)]
pub struct VisionTransformer {
    pub patch_embed: Linear,
    pub pos_embed: Param,
    pub blocks: Vec<TransformerBlock>,
    pub final_norm: LayerNorm,
    pub head: Linear,
    image_size: u32,
    patch_size: u32,
    tokens: usize,
}

pub struct VitCtx {
    patch_ctx: LinearCtx,
    block_ctxs: Vec<BlockCtx>,
    final_ctx: LayerNormCtx,
    head_ctx: LinearCtx,
    images: usize,
}

impl VisionTransformer {
    pub fn new(
        name: &str,
        config: &EncoderConfig,
        lora: Option<&LoRAConfig>,
        trainable: bool,
        seed: u64,
    ) -> Self {
        let mut rng = rng_for(seed, &format!("init.{name}"));
        let patches_per_side = (config.image_size / config.patch_size) as usize;
        let tokens = patches_per_side * patches_per_side;
        let patch_dim = 3 * (config.patch_size * config.patch_size) as usize;
        let adapters = lora.map(|l| (l.adapter_sites(), l.rank, l.alpha));
        let patch_embed =
            Linear::new(&format!("{name}.patch_embed"), patch_dim, config.width, trainable, &mut rng);
        let pos_embed = Param::randn(
            format!("{name}.pos_embed"),
            tokens,
            config.width,
            0.02,
            trainable,
            &mut rng,
        );
        let residual_scale = 1.0 / (2.0 * config.depth as f64).sqrt();
        let blocks = (0..config.depth)
            .map(|i| {
                TransformerBlock::new(
                    &format!("{name}.blocks.{i}"),
                    config.width,
                    config.heads,
                    trainable,
                    adapters,
                    residual_scale,
                    &mut rng,
                )
            })
            .collect();
        let final_norm = LayerNorm::new(&format!("{name}.final_norm"), config.width, trainable);
        let head =
            Linear::new(&format!("{name}.head"), config.width, config.embed_dim, trainable, &mut rng);
        Self {
            patch_embed,
            pos_embed,
            blocks,
            final_norm,
            head,
            image_size: config.image_size,
            patch_size: config.patch_size,
            tokens,
        }
    }

    pub fn embed_dim(&self) -> usize {
        self.head.out_dim()
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    /// Flatten images to a `(images*tokens) x patch_dim` matrix. Pixels are
    /// scaled to `[-1, 1]` when `normalize_pixels` is set, `[0, 1]`
    /// otherwise.
    fn patchify(&self, images: &[&RgbImage], normalize_pixels: bool) -> Result<Array2<f64>, EncoderError> {
        let p = self.patch_size;
        let side = self.image_size / p;
        let patch_dim = 3 * (p * p) as usize;
        let mut out = Array2::zeros((images.len() * self.tokens, patch_dim));
        for (k, img) in images.iter().enumerate() {
            if img.dimensions() != (self.image_size, self.image_size) {
                return Err(EncoderError::Shape(format!(
                    "image {k} is {:?}, encoder expects {}x{}",
                    img.dimensions(),
                    self.image_size,
                    self.image_size
                )));
            }
            for py in 0..side {
                for px in 0..side {
                    let row = k * self.tokens + (py * side + px) as usize;
                    let mut col = 0;
                    for y in 0..p {
                        for x in 0..p {
                            let pixel = img.get_pixel(px * p + x, py * p + y);
                            for c in 0..3 {
                                let v = pixel[c] as f64 / 255.0;
                                out[[row, col]] = if normalize_pixels { (v - 0.5) / 0.5 } else { v };
                                col += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Forward pass with caches for backprop. Returns `images x embed_dim`.
    pub fn forward(
        &self,
        images: &[&RgbImage],
        normalize_pixels: bool,
    ) -> Result<(Array2<f64>, VitCtx), EncoderError> {
        if images.is_empty() {
            return Err(EncoderError::Shape("empty image batch".into()));
        }
        let patches = self.patchify(images, normalize_pixels)?;
        let (mut tokens, patch_ctx) = self.patch_embed.forward(&patches);
        for k in 0..images.len() {
            let rows = k * self.tokens..(k + 1) * self.tokens;
            tokens.slice_mut(s![rows, ..]).zip_mut_with(&self.pos_embed.value, |t, p| *t += p);
        }
        let mut block_ctxs = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let (next, ctx) = block.forward(&tokens, self.tokens);
            tokens = next;
            block_ctxs.push(ctx);
        }
        let (normed, final_ctx) = self.final_norm.forward(&tokens);
        let pooled = pool_mean(&normed, self.tokens, images.len());
        let (emb, head_ctx) = self.head.forward(&pooled);
        if emb.iter().any(|v| !v.is_finite()) {
            return Err(EncoderError::NonFinite("image embedding".into()));
        }
        Ok((emb, VitCtx { patch_ctx, block_ctxs, final_ctx, head_ctx, images: images.len() }))
    }

    /// Backward from `d_emb` (`images x embed_dim`), accumulating gradients
    /// into every trainable parameter of the tower.
    pub fn backward(&mut self, ctx: &VitCtx, d_emb: &Array2<f64>) {
        let d_pooled = self.head.backward(&ctx.head_ctx, d_emb);
        let d_normed = unpool_mean(&d_pooled, self.tokens, ctx.images);
        let mut d_tokens = self.final_norm.backward(&ctx.final_ctx, &d_normed);
        for (block, bctx) in self.blocks.iter_mut().zip(&ctx.block_ctxs).rev() {
            d_tokens = block.backward(bctx, &d_tokens);
        }
        if self.pos_embed.trainable {
            for k in 0..ctx.images {
                let rows = k * self.tokens..(k + 1) * self.tokens;
                self.pos_embed.grad += &d_tokens.slice(s![rows, ..]);
            }
        }
        self.patch_embed.backward(&ctx.patch_ctx, &d_tokens);
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = self.patch_embed.params();
        out.push(&self.pos_embed);
        for b in &self.blocks {
            out.extend(b.params());
        }
        out.extend(self.final_norm.params());
        out.extend(self.head.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.patch_embed.params_mut();
        out.push(&mut self.pos_embed);
        for b in &mut self.blocks {
            out.extend(b.params_mut());
        }
        out.extend(self.final_norm.params_mut());
        out.extend(self.head.params_mut());
        out
    }
}

fn pool_mean(tokens: &Array2<f64>, tokens_per_image: usize, images: usize) -> Array2<f64> {
    let width = tokens.ncols();
    let mut pooled = Array2::zeros((images, width));
    for k in 0..images {
        let rows = tokens.slice(s![k * tokens_per_image..(k + 1) * tokens_per_image, ..]);
        pooled
            .row_mut(k)
            .assign(&(rows.sum_axis(Axis(0)) / tokens_per_image as f64));
    }
    pooled
}

fn unpool_mean(d_pooled: &Array2<f64>, tokens_per_image: usize, images: usize) -> Array2<f64> {
    let width = d_pooled.ncols();
    let mut d_tokens = Array2::zeros((images * tokens_per_image, width));
    for k in 0..images {
        let share = &d_pooled.row(k) / tokens_per_image as f64;
        for t in 0..tokens_per_image {
            d_tokens.row_mut(k * tokens_per_image + t).assign(&share);
        }
    }
    d_tokens
}
