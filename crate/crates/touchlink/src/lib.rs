//! Touch-language-vision representation alignment at desk scale.
//!
//! The library links three modalities around a GelSight-style touch sensor:
//! a fully trainable touch encoder (student), a frozen vision encoder
//! adapted with low-rank adapters (teacher), and a frozen text encoder over
//! multi-granularity descriptions. Training mixes teacher and student
//! embeddings under a linearly decaying curriculum weight and aligns the mix
//! to fused text features with a temperature-scaled contrastive loss.
//!
//! Everything runs on one CPU core with `f64` math and hand-written
//! backpropagation, so gradient checks, freezing contracts, and loss oracles
//! can be verified exactly.
//!
//! Entry points:
//! - [`data`] — dataset schema, JSONL/PNG persistence, synthetic generators
//! - [`curriculum`] — teacher-weight schedule and representation mixing
//! - [`encoders`] — toy transformer towers, LoRA adapters, checkpoints
//! - [`alignment`] — text fusion, the contrastive objective, the train loop
//! - [`eval`] — linear probing, zero-shot classification, ablations, 2-D maps
//! - [`curation`] — description filtering and the pluggable consistency judge
//! - [`cli`] — the `touchlink` command-line front end
//!
//! The `examples/` directory holds one runnable program per capability; see
//! the README for the tour.

pub mod alignment;
pub mod cli;
pub mod curation;
pub mod curriculum;
pub mod data;
pub mod encoders;
pub mod eval;
pub mod nn;
pub mod util;
