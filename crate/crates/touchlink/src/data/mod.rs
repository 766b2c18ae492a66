//! Dataset record schema, on-disk format, splits, and synthetic generators.
//!
//! A dataset on disk is a directory holding `manifest.json`, `records.jsonl`
//! (one record object per line), and an `images/` folder of lossless PNGs
//! referenced by relative path. The synthetic generator stands in for a
//! full-scale touch corpus: class-keyed procedural textures paired with
//! multi-granularity descriptions rendered from a class-attribute lexicon.

mod io;
mod synthetic;

pub use io::{load_all, load_dataset, save_dataset, SampleReader};
pub use synthetic::{
    attribute_words as synthetic_attribute_words, generate_grasp, generate_synthetic,
    material_lexicon, GraspConfig, MaterialEntry, SyntheticConfig, LEXICON,
};

use std::collections::BTreeMap;

use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("record {id}: {message}")]
    Validation { id: String, message: String },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("image error on {path}: {source}")]
    Image {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

/// Task labels attached to every record. The binary attributes are a fixed
/// function of the material class for synthetic data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    /// Material class id in `[0, M)`.
    pub material: usize,
    /// 1 = hard, 0 = soft.
    pub hard_soft: u8,
    /// 1 = rough, 0 = smooth.
    pub rough_smooth: u8,
}

/// Four tactile frames around a grasp attempt: before/after for the left
/// and right sensor, in that order.
#[derive(Debug, Clone)]
pub struct GraspObservation {
    pub frames: Vec<RgbImage>,
    /// 1 = the grasp held, 0 = it slipped.
    pub success: u8,
}

/// One paired record: touch image, vision image, sentence- and phrase-level
/// descriptions, task labels, and (for grasp data) the four-frame sequence.
#[derive(Debug, Clone)]
pub struct Sample {
    pub id: String,
    pub touch_image: RgbImage,
    pub vision_image: RgbImage,
    pub sentence_description: String,
    pub phrase_descriptions: Vec<String>,
    pub labels: Labels,
    pub grasp: Option<GraspObservation>,
    /// Set by the synthetic generator on records it corrupted, naming the
    /// injected defect. Used as ground truth for filter-recall tests.
    pub corruption_tag: Option<String>,
}

impl Sample {
    /// Check the per-record invariants against the declared class count.
    pub fn validate(&self, class_count: usize) -> Result<(), DataError> {
        let fail = |message: String| {
            Err(DataError::Validation { id: self.id.clone(), message })
        };
        if self.touch_image.dimensions() != self.vision_image.dimensions() {
            return fail(format!(
                "touch {:?} and vision {:?} dimensions differ",
                self.touch_image.dimensions(),
                self.vision_image.dimensions()
            ));
        }
        if self.phrase_descriptions.is_empty() {
            return fail("phrase_descriptions must be non-empty".into());
        }
        if self.phrase_descriptions.iter().any(|p| p.trim().is_empty()) {
            return fail("phrase_descriptions contains a blank phrase".into());
        }
        if self.labels.material >= class_count {
            return fail(format!(
                "material class {} out of range for {} classes",
                self.labels.material, class_count
            ));
        }
        if self.labels.hard_soft > 1 || self.labels.rough_smooth > 1 {
            return fail("binary labels must be 0 or 1".into());
        }
        if let Some(grasp) = &self.grasp {
            if grasp.frames.len() != 4 {
                return fail(format!("grasp_frames has {} frames, need exactly 4", grasp.frames.len()));
            }
            if grasp.success > 1 {
                return fail("grasp_success must be 0 or 1".into());
            }
        }
        Ok(())
    }
}

/// Dataset-level metadata: class names, named splits, seed, record count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub class_names: Vec<String>,
    pub splits: BTreeMap<String, Vec<String>>,
    pub seed: u64,
    pub size: usize,
}

impl DatasetManifest {
    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn split(&self, name: &str) -> Result<&[String], DataError> {
        self.splits
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| DataError::Manifest(format!("no split named '{name}'")))
    }

    /// Splits must be pairwise disjoint and only reference known ids;
    /// `size` must equal the record count.
    pub fn validate(&self, record_ids: &[String]) -> Result<(), DataError> {
        if self.size != record_ids.len() {
            return Err(DataError::Manifest(format!(
                "manifest size {} but {} records on disk",
                self.size,
                record_ids.len()
            )));
        }
        let known: std::collections::BTreeSet<&str> =
            record_ids.iter().map(String::as_str).collect();
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for (split, ids) in &self.splits {
            for id in ids {
                if !known.contains(id.as_str()) {
                    return Err(DataError::Manifest(format!(
                        "split '{split}' references unknown id '{id}'"
                    )));
                }
                if let Some(other) = seen.insert(id, split) {
                    return Err(DataError::Manifest(format!(
                        "id '{id}' appears in splits '{other}' and '{split}'"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The dataset-scale ablation fractions. Anything else is rejected.
pub const SUBSAMPLE_FRACTIONS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Shrink the train split to a seeded uniform sample of `floor(fraction *
/// |train|)` ids, leaving eval splits untouched. The seeded permutation is
/// shared across fractions, so the 25% subset is contained in the 50%
/// subset for the same seed.
pub fn subsample(
    manifest: &DatasetManifest,
    fraction: f64,
    seed: u64,
) -> Result<DatasetManifest, DataError> {
    if !SUBSAMPLE_FRACTIONS.contains(&fraction) {
        return Err(DataError::Config(format!(
            "fraction must be one of {SUBSAMPLE_FRACTIONS:?}, got {fraction}"
        )));
    }
    if manifest.size == 0 {
        return Err(DataError::Config("cannot subsample an empty dataset".into()));
    }
    if fraction == 1.0 {
        return Ok(manifest.clone());
    }
    let train = manifest.split("train")?;
    let keep = ((fraction * train.len() as f64).floor()) as usize;
    let mut order: Vec<usize> = (0..train.len()).collect();
    {
        use rand::seq::SliceRandom;
        // Keyed by seed only: the permutation prefix nests across fractions.
        let mut rng = crate::util::rng_for(seed, "data.subsample");
        order.shuffle(&mut rng);
    }
    let chosen: std::collections::BTreeSet<usize> = order.into_iter().take(keep).collect();
    let kept: Vec<String> = train
        .iter()
        .enumerate()
        .filter(|(i, _)| chosen.contains(i))
        .map(|(_, id)| id.clone())
        .collect();
    let mut out = manifest.clone();
    out.splits.insert("train".into(), kept);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_manifest(train: usize) -> DatasetManifest {
        let ids: Vec<String> = (0..train + 4).map(|i| format!("s{i:04}")).collect();
        let mut splits = BTreeMap::new();
        splits.insert("train".to_string(), ids[..train].to_vec());
        splits.insert("test".to_string(), ids[train..].to_vec());
        DatasetManifest {
            name: "tiny".into(),
            class_names: vec!["a".into(), "b".into()],
            splits,
            seed: 1,
            size: train + 4,
        }
    }

    #[test]
    fn subsample_identity_at_full_fraction() {
        let m = tiny_manifest(100);
        let out = subsample(&m, 1.0, 9).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn subsample_exact_cardinality() {
        let m = tiny_manifest(100);
        let out = subsample(&m, 0.5, 9).unwrap();
        assert_eq!(out.split("train").unwrap().len(), 50);
        assert_eq!(out.split("test").unwrap().len(), 4);
    }

    #[test]
    fn subsample_fractions_nest() {
        let m = tiny_manifest(100);
        let take = |f: f64| -> std::collections::BTreeSet<String> {
            subsample(&m, f, 42)
                .unwrap()
                .split("train")
                .unwrap()
                .iter()
                .cloned()
                .collect()
        };
        let q = take(0.25);
        let h = take(0.5);
        let t = take(0.75);
        assert!(q.is_subset(&h) && h.is_subset(&t));
        assert_eq!((q.len(), h.len(), t.len()), (25, 50, 75));
    }

    #[test]
    fn subsample_rejects_odd_fractions() {
        let m = tiny_manifest(10);
        assert!(subsample(&m, 0.3, 1).is_err());
    }

    #[test]
    fn manifest_validation_catches_overlap_and_unknown_ids() {
        let mut m = tiny_manifest(4);
        let ids: Vec<String> = (0..8).map(|i| format!("s{i:04}")).collect();
        m.validate(&ids).unwrap();
        m.splits.get_mut("test").unwrap().push("s0000".into());
        assert!(m.validate(&ids).is_err());
        let mut m2 = tiny_manifest(4);
        m2.splits.get_mut("train").unwrap().push("ghost".into());
        assert!(m2.validate(&ids).is_err());
    }
}
