//! Frozen text tower over a hashed whitespace vocabulary.
//!
//! There is no pretrained checkpoint at desk scale: the weights are seeded
//! random and never updated, which is exactly the contract the rest of the
//! system depends on (the text encoder is a fixed target the trainable
//! towers align to). `load_weights` on the checkpoint module accepts
//! externally trained parameters for anyone who wants a stronger tower.

use ndarray::{s, Array2};

use super::{EncoderConfig, EncoderError};
use crate::nn::{LayerNorm, Linear, Param, TransformerBlock};
use crate::util::{fnv1a, rng_for};

pub const PAD_ID: usize = 0;
/// Reserved id for tokens that normalize to nothing.
pub const UNK_ID: usize = 1;
const RESERVED: usize = 2;

/// Lowercase, split on whitespace, trim edge punctuation, hash into the
/// fixed vocabulary.
pub fn tokenize(text: &str, vocab_size: usize) -> Vec<usize> {
    text.split_whitespace()
        .map(|raw| {
            let token: String = raw
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase();
            if token.is_empty() {
                UNK_ID
            } else {
                (fnv1a(token.as_bytes()) as usize % (vocab_size - RESERVED)) + RESERVED
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct TextTransformer {
    pub token_embed: Param, // vocab x width
    pub pos_embed: Param,   // max_len x width
    pub blocks: Vec<TransformerBlock>,
    pub final_norm: LayerNorm,
    pub head: Linear,
    vocab_size: usize,
    max_len: usize,
}

impl TextTransformer {
    pub fn new(name: &str, config: &EncoderConfig, seed: u64) -> Self {
        let mut rng = rng_for(seed, &format!("init.{name}"));
        // Frozen throughout: every parameter is built with trainable=false.
        let token_embed = Param::randn(
            format!("{name}.token_embed"),
            config.vocab_size,
            config.width,
            1.0,
            false,
            &mut rng,
        );
        let pos_embed = Param::randn(
            format!("{name}.pos_embed"),
            config.max_text_len,
            config.width,
            0.02,
            false,
            &mut rng,
        );
        let residual_scale = 1.0 / (2.0 * config.depth as f64).sqrt();
        let blocks = (0..config.depth)
            .map(|i| {
                TransformerBlock::new(
                    &format!("{name}.blocks.{i}"),
                    config.width,
                    config.heads,
                    false,
                    None,
                    residual_scale,
                    &mut rng,
                )
            })
            .collect();
        let final_norm = LayerNorm::new(&format!("{name}.final_norm"), config.width, false);
        let head = Linear::new(&format!("{name}.head"), config.width, config.embed_dim, false, &mut rng);
        Self { token_embed, pos_embed, blocks, final_norm, head, vocab_size: config.vocab_size, max_len: config.max_text_len }
    }

    pub fn embed_dim(&self) -> usize {
        self.head.out_dim()
    }

    /// Encode a batch of strings to `K x embed_dim`. Tokens beyond
    /// `max_text_len` are truncated; shorter texts are padded, and pooling
    /// skips the padding.
    pub fn forward(&self, texts: &[&str]) -> Result<Array2<f64>, EncoderError> {
        if texts.is_empty() {
            return Err(EncoderError::Shape("empty text batch".into()));
        }
        let width = self.token_embed.value.ncols();
        let l = self.max_len;
        let mut lens = Vec::with_capacity(texts.len());
        let mut tokens = Array2::zeros((texts.len() * l, width));
        for (k, text) in texts.iter().enumerate() {
            let ids = tokenize(text, self.vocab_size);
            if ids.is_empty() {
                return Err(EncoderError::EmptyText { index: k });
            }
            let len = ids.len().min(l);
            lens.push(len);
            for j in 0..l {
                let id = if j < len { ids[j] } else { PAD_ID };
                let mut row = tokens.row_mut(k * l + j);
                row.assign(&self.token_embed.value.row(id));
                row += &self.pos_embed.value.row(j);
            }
        }
        let mut x = tokens;
        for block in &self.blocks {
            x = block.forward(&x, l).0;
        }
        let x = self.final_norm.apply(&x);
        let mut pooled = Array2::zeros((texts.len(), width));
        for (k, &len) in lens.iter().enumerate() {
            let rows = x.slice(s![k * l..k * l + len, ..]);
            pooled
                .row_mut(k)
                .assign(&(rows.sum_axis(ndarray::Axis(0)) / len as f64));
        }
        let out = self.head.apply(&pooled);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(EncoderError::NonFinite("text embedding".into()));
        }
        Ok(out)
    }

    pub fn params(&self) -> Vec<&Param> {
        let mut out = vec![&self.token_embed, &self.pos_embed];
        for b in &self.blocks {
            out.extend(b.params());
        }
        out.extend(self.final_norm.params());
        out.extend(self.head.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = vec![&mut self.token_embed, &mut self.pos_embed];
        for b in &mut self.blocks {
            out.extend(b.params_mut());
        }
        out.extend(self.final_norm.params_mut());
        out.extend(self.head.params_mut());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> TextTransformer {
        let config = EncoderConfig {
            image_size: 32,
            patch_size: 8,
            depth: 2,
            width: 16,
            heads: 2,
            embed_dim: 8,
            vocab_size: 256,
            max_text_len: 6,
        };
        TextTransformer::new("text", &config, 11)
    }

    #[test]
    fn same_string_encodes_identically() {
        let t = tiny();
        let out = t.forward(&["a rough wooden board", "a rough wooden board"]).unwrap();
        assert_eq!(out.row(0), out.row(1));
    }

    #[test]
    fn truncation_ignores_tokens_past_max_len() {
        let t = tiny();
        let short = "one two three four five six";
        let long = "one two three four five six seven eight nine";
        let out = t.forward(&[short, long]).unwrap();
        assert_eq!(out.row(0), out.row(1));
    }

    #[test]
    fn different_strings_differ() {
        let t = tiny();
        let out = t.forward(&["cold smooth metal", "warm fuzzy wool"]).unwrap();
        assert_ne!(out.row(0), out.row(1));
    }

    #[test]
    fn empty_string_is_rejected() {
        let t = tiny();
        assert!(matches!(t.forward(&["  "]), Err(EncoderError::EmptyText { index: 0 })));
    }

    #[test]
    fn tokenizer_strips_edge_punctuation() {
        let a = tokenize("Rough, surface.", 256);
        let b = tokenize("rough surface", 256);
        assert_eq!(a, b);
    }

    #[test]
    fn every_parameter_is_frozen() {
        let t = tiny();
        assert!(t.params().iter().all(|p| !p.trainable));
    }
}
