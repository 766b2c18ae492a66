//! Deterministic synthetic stand-in for a paired touch-language-vision
//! corpus.
//!
//! Every sample draws a latent material class. The touch image is a striped
//! procedural texture whose orientation and frequency are keyed to the
//! class; the vision image is a class-keyed color-and-shape pattern. The
//! descriptions are rendered from a fixed class-attribute lexicon plus the
//! sample id, so binary labels are a pure function of the class and every
//! sample's text is distinguishable. A configurable fraction of records get
//! exactly one injected text defect and a matching `corruption_tag`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use image::RgbImage;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataError, DatasetManifest, GraspObservation, Labels, Sample};
use crate::util::rng_for;

/// One material class: display name, binary attributes, and words the
/// renderer (and the mock consistency judge) treat as class-characteristic.
#[derive(Debug, Clone, Copy)]
pub struct MaterialEntry {
    pub name: &'static str,
    pub hard: bool,
    pub rough: bool,
    pub adjectives: [&'static str; 2],
    pub noun: &'static str,
}

/// Twenty materials; the first four cover every hard/soft x rough/smooth
/// combination so binary tasks are non-degenerate at the default M = 4.
pub const LEXICON: [MaterialEntry; 20] = [
    MaterialEntry { name: "metal", hard: true, rough: false, adjectives: ["cool", "polished"], noun: "plate" },
    MaterialEntry { name: "wood", hard: true, rough: true, adjectives: ["grainy", "dry"], noun: "board" },
    MaterialEntry { name: "fabric", hard: false, rough: false, adjectives: ["silky", "light"], noun: "swatch" },
    MaterialEntry { name: "foam", hard: false, rough: true, adjectives: ["springy", "porous"], noun: "pad" },
    MaterialEntry { name: "stone", hard: true, rough: true, adjectives: ["gritty", "heavy"], noun: "slab" },
    MaterialEntry { name: "glass", hard: true, rough: false, adjectives: ["slick", "cold"], noun: "pane" },
    MaterialEntry { name: "rubber", hard: false, rough: false, adjectives: ["pliable", "tacky"], noun: "mat" },
    MaterialEntry { name: "leather", hard: false, rough: false, adjectives: ["supple", "warm"], noun: "hide" },
    MaterialEntry { name: "brick", hard: true, rough: true, adjectives: ["abrasive", "dusty"], noun: "block" },
    MaterialEntry { name: "ceramic", hard: true, rough: false, adjectives: ["glazed", "chilly"], noun: "tile" },
    MaterialEntry { name: "cork", hard: false, rough: true, adjectives: ["crumbly", "airy"], noun: "disc" },
    MaterialEntry { name: "sponge", hard: false, rough: true, adjectives: ["squishy", "damp"], noun: "cushion" },
    MaterialEntry { name: "plastic", hard: true, rough: false, adjectives: ["cheap", "uniform"], noun: "shell" },
    MaterialEntry { name: "denim", hard: false, rough: true, adjectives: ["woven", "sturdy"], noun: "patch" },
    MaterialEntry { name: "velvet", hard: false, rough: false, adjectives: ["plush", "delicate"], noun: "cloth" },
    MaterialEntry { name: "concrete", hard: true, rough: true, adjectives: ["unyielding", "pitted"], noun: "wall" },
    MaterialEntry { name: "marble", hard: true, rough: false, adjectives: ["veined", "dense"], noun: "countertop" },
    MaterialEntry { name: "wool", hard: false, rough: true, adjectives: ["fuzzy", "thick"], noun: "weave" },
    MaterialEntry { name: "cardboard", hard: false, rough: true, adjectives: ["papery", "hollow"], noun: "sheet" },
    MaterialEntry { name: "sandpaper", hard: true, rough: true, adjectives: ["scratchy", "coarse"], noun: "strip" },
];

/// Lexicon entry for a class id, synthesizing entries past the table.
pub fn material_lexicon(class: usize) -> MaterialEntry {
    if class < LEXICON.len() {
        LEXICON[class]
    } else {
        // Fabricated names keep M unbounded for stress tests.
        MaterialEntry {
            name: "composite",
            hard: class % 2 == 0,
            rough: (class / 2) % 2 == 0,
            adjectives: ["layered", "synthetic"],
            noun: "sample",
        }
    }
}

/// Words the mock consistency judge accepts as evidence that a description
/// matches the class.
pub fn attribute_words(class: usize) -> Vec<String> {
    let e = material_lexicon(class);
    vec![
        e.name.to_string(),
        if e.hard { "hard" } else { "soft" }.to_string(),
        if e.rough { "rough" } else { "smooth" }.to_string(),
        e.adjectives[0].to_string(),
        e.adjectives[1].to_string(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    /// Material class count M.
    pub class_count: usize,
    /// Total record count n.
    pub samples: usize,
    pub height: u32,
    pub width: u32,
    pub seed: u64,
    /// Fraction of records that receive exactly one injected text defect.
    pub corruption_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self { class_count: 4, samples: 256, height: 32, width: 32, seed: 7, corruption_rate: 0.0 }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<(), DataError> {
        if self.class_count < 2 {
            return Err(DataError::Config("class_count must be >= 2".into()));
        }
        if self.samples < self.class_count {
            return Err(DataError::Config("samples must be >= class_count".into()));
        }
        if self.height < 16 || self.width < 16 {
            return Err(DataError::Config("height and width must be >= 16".into()));
        }
        if !(0.0..1.0).contains(&self.corruption_rate) {
            return Err(DataError::Config("corruption_rate must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

fn noise(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    Normal::new(0.0, sigma).unwrap().sample(rng)
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn class_tint(class: usize) -> [f64; 3] {
    // Gentle per-class channel gains; keeps textures RGB without burying
    // the stripe signal.
    let h = (class as f64) * 0.37;
    [1.0 - 0.15 * h.sin().abs(), 1.0 - 0.15 * h.cos().abs(), 1.0 - 0.15 * (h * 1.7).sin().abs()]
}

/// Striped texture keyed to the class: orientation and spatial frequency
/// both depend on the class id, plus seeded per-pixel noise.
fn touch_texture(class: usize, m: usize, h: u32, w: u32, rng: &mut ChaCha8Rng) -> RgbImage {
    let theta = PI * class as f64 / m as f64;
    let freq = 2.0 + (class % 5) as f64;
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let tint = class_tint(class);
    let mut img = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let u = (x as f64 * cos_t + y as f64 * sin_t) / w as f64;
            let base = 127.5 + 95.0 * (2.0 * PI * freq * u + 0.7).sin();
            let px = img.get_pixel_mut(x, y);
            for c in 0..3 {
                px[c] = clamp_u8(base * tint[c] + noise(rng, 18.0));
            }
        }
    }
    img
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let c = v * s;
    let hp = (h % 360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [(r + m) * 255.0, (g + m) * 255.0, (b + m) * 255.0]
}

/// Class-keyed color-and-shape pattern: tinted background with a centered
/// filled shape (circle, square, diamond, or cross by class).
fn vision_pattern(class: usize, m: usize, h: u32, w: u32, rng: &mut ChaCha8Rng) -> RgbImage {
    let bg = hsv_to_rgb(class as f64 * 360.0 / m as f64, 0.55, 0.85);
    let fg = hsv_to_rgb(class as f64 * 360.0 / m as f64 + 180.0, 0.7, 0.55);
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let r = w.min(h) as f64 / 3.2;
    let mut img = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let inside = match class % 4 {
                0 => dx * dx + dy * dy <= r * r,
                1 => dx.abs() <= r && dy.abs() <= r,
                2 => dx.abs() + dy.abs() <= r * 1.2,
                _ => dx.abs() <= r * 0.35 || dy.abs() <= r * 0.35,
            };
            let color = if inside { fg } else { bg };
            let px = img.get_pixel_mut(x, y);
            for c in 0..3 {
                px[c] = clamp_u8(color[c] + noise(rng, 8.0));
            }
        }
    }
    img
}

/// Free impression vocabulary, drawn per sample rather than per class. Two
/// annotators describing the same class word their impressions differently;
/// this variation is what keeps per-sample descriptions distinguishable.
const IMPRESSIONS: [&str; 48] = [
    "matte", "dusty", "chalky", "waxy", "glossy", "grainy", "velvety", "icy", "tepid", "sleek",
    "satiny", "rugged", "knobby", "ribbed", "pebbly", "silken", "brittle", "spongy", "leathery",
    "powdery", "greasy", "sticky", "slippery", "crinkly", "wrinkled", "stubbly", "bristly",
    "downy", "feathery", "gauzy", "meshy", "nubby", "corrugated", "dimpled", "etched", "fluted",
    "honeycombed", "lacy", "lumpy", "mottled", "pocked", "quilted", "scaly", "scored", "streaky",
    "swirled", "veiny", "wavy",
];

const SURFACE_WORDS: [&str; 8] =
    ["texture", "grain", "finish", "face", "skin", "crust", "nap", "weave"];

const SENTENCE_TEMPLATES: usize = 4;

fn render_sentence(template: usize, id: &str, e: &MaterialEntry, imp: &[&str; 3]) -> String {
    let hard = if e.hard { "hard" } else { "soft" };
    let rough = if e.rough { "rough" } else { "smooth" };
    match template % SENTENCE_TEMPLATES {
        0 => format!(
            "Specimen {id} is a {} {} that feels {hard} and {rough}, leaving a {} {} impression.",
            e.name, e.noun, imp[0], imp[1]
        ),
        1 => format!(
            "Touching specimen {id} reveals a {hard}, {rough} {} with a {} {} character.",
            e.name, imp[0], imp[1]
        ),
        2 => format!(
            "The {} {} of specimen {id} presses back {hard}, dragging {rough} and {} over skin.",
            e.name, e.noun, imp[0]
        ),
        _ => format!(
            "Specimen {id} offers a {} {} touch, {hard} to press, {rough} and {} to stroke.",
            imp[0], e.name, imp[1]
        ),
    }
}

fn render_phrases(id: &str, e: &MaterialEntry, imp: &[&str; 3], rng: &mut ChaCha8Rng) -> Vec<String> {
    let hard = if e.hard { "hard" } else { "soft" };
    let rough = if e.rough { "rough" } else { "smooth" };
    let surface = SURFACE_WORDS[rng.gen_range(0..SURFACE_WORDS.len())];
    let mut phrases = vec![
        format!("{hard} {} {}", e.name, e.noun),
        format!("{rough} {} {surface}", imp[0]),
        format!("{} {} feel", imp[1], imp[2]),
        format!("patch {id}"),
    ];
    phrases.shuffle(rng);
    phrases
}

/// The three defect families the curation filter must catch, exactly one
/// injected per corrupted record.
const DEFECT_KINDS: [&str; 3] = ["multilanguage", "special_marker", "redundancy"];

fn inject_defect(kind: &str, sentence: &str) -> String {
    match kind {
        "multilanguage" => format!("{sentence} 触感光滑"),
        "special_marker" => format!("{sentence} **verified**"),
        "redundancy" => {
            let first = sentence.split_inclusive('.').next().unwrap_or(sentence);
            format!("{sentence} {}", first.trim())
        }
        _ => unreachable!("unknown defect kind"),
    }
}

/// Generate the material-classification dataset. Pure function of the
/// config: the same config yields byte-identical samples.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<(DatasetManifest, Vec<Sample>), DataError> {
    config.validate()?;
    let m = config.class_count;
    let n = config.samples;

    // Balanced classes by round-robin assignment.
    let classes: Vec<usize> = (0..n).map(|i| i % m).collect();

    // Seeded choice of which records get a defect, and which kind.
    let corrupt_count = (config.corruption_rate * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(config.seed, "data.corruption"));
    let mut kind_rng = rng_for(config.seed, "data.corruption_kind");
    let mut corruption: BTreeMap<usize, &str> = BTreeMap::new();
    for &idx in order.iter().take(corrupt_count) {
        corruption.insert(idx, DEFECT_KINDS[kind_rng.gen_range(0..DEFECT_KINDS.len())]);
    }

    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let class = classes[i];
        let e = material_lexicon(class);
        let id = format!("s{i:05}");
        let mut rng = rng_for(config.seed, &format!("data.sample.{i}"));
        let touch = touch_texture(class, m, config.height, config.width, &mut rng);
        let vision = vision_pattern(class, m, config.height, config.width, &mut rng);
        let template = rng.gen_range(0..SENTENCE_TEMPLATES);
        let imp = {
            // Three distinct impression words per sample.
            let mut pool: Vec<&str> = IMPRESSIONS.to_vec();
            pool.shuffle(&mut rng);
            [pool[0], pool[1], pool[2]]
        };
        let mut sentence = render_sentence(template, &id, &e, &imp);
        let phrases = render_phrases(&id, &e, &imp, &mut rng);
        let corruption_tag = corruption.get(&i).map(|kind| {
            sentence = inject_defect(kind, &sentence);
            kind.to_string()
        });
        samples.push(Sample {
            id,
            touch_image: touch,
            vision_image: vision,
            sentence_description: sentence,
            phrase_descriptions: phrases,
            labels: Labels {
                material: class,
                hard_soft: e.hard as u8,
                rough_smooth: e.rough as u8,
            },
            grasp: None,
            corruption_tag,
        });
    }

    let manifest = build_manifest("synthetic-material", config.seed, m, &samples, |c| {
        material_lexicon(c).name.to_string()
    });
    Ok((manifest, samples))
}

/// 75/25 train/test split inside each class, by position within the class.
fn build_manifest(
    name: &str,
    seed: u64,
    class_count: usize,
    samples: &[Sample],
    class_name: impl Fn(usize) -> String,
) -> DatasetManifest {
    let mut per_class_seen = vec![0usize; class_count];
    let per_class_total = {
        let mut totals = vec![0usize; class_count];
        for s in samples {
            totals[s.labels.material] += 1;
        }
        totals
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for s in samples {
        let c = s.labels.material;
        let cut = ((per_class_total[c] * 3) / 4).max(1);
        if per_class_seen[c] < cut {
            train.push(s.id.clone());
        } else {
            test.push(s.id.clone());
        }
        per_class_seen[c] += 1;
    }
    let mut splits = BTreeMap::new();
    splits.insert("train".to_string(), train);
    splits.insert("test".to_string(), test);
    DatasetManifest {
        name: name.to_string(),
        class_names: (0..class_count).map(class_name).collect(),
        splits,
        seed,
        size: samples.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspConfig {
    /// Number of grasp attempts to synthesize.
    pub samples: usize,
    /// Texture classes the gripper pads may carry.
    pub texture_classes: usize,
    pub height: u32,
    pub width: u32,
    pub seed: u64,
}

impl Default for GraspConfig {
    fn default() -> Self {
        Self { samples: 128, texture_classes: 4, height: 32, width: 32, seed: 7 }
    }
}

/// Center dimple stamped on the after-contact frames.
fn stamp_contact(img: &mut RgbImage) {
    let (w, h) = img.dimensions();
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let r = w.min(h) as f64 / 4.0;
    for y in 0..h {
        for x in 0..w {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            if d2 < r * r {
                let fade = 1.0 - d2 / (r * r);
                let px = img.get_pixel_mut(x, y);
                for c in 0..3 {
                    px[c] = clamp_u8(px[c] as f64 - 70.0 * fade);
                }
            }
        }
    }
}

/// Horizontal smear applied to after-frames of a slipping grasp.
fn smear(img: &RgbImage) -> RgbImage {
    let (w, h) = img.dimensions();
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0f64; 3];
            for dx in 0..6u32 {
                let sx = (x + dx) % w;
                let p = img.get_pixel(sx, y);
                for c in 0..3 {
                    acc[c] += p[c] as f64;
                }
            }
            let px = out.get_pixel_mut(x, y);
            for c in 0..3 {
                px[c] = clamp_u8(acc[c] / 6.0);
            }
        }
    }
    out
}

/// Grasp-outcome dataset: each record holds four tactile frames
/// (before/after x left/right). The grasp succeeds exactly when the two pad
/// textures are compatible (same class); failed attempts leave a smeared
/// after-contact pattern.
pub fn generate_grasp(config: &GraspConfig) -> Result<(DatasetManifest, Vec<Sample>), DataError> {
    if config.samples < 4 {
        return Err(DataError::Config("grasp dataset needs at least 4 samples".into()));
    }
    if config.texture_classes < 2 {
        return Err(DataError::Config("texture_classes must be >= 2".into()));
    }
    if config.height < 16 || config.width < 16 {
        return Err(DataError::Config("height and width must be >= 16".into()));
    }
    let m = config.texture_classes;
    let mut samples = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let left = i % m;
        let success = i % 2 == 0;
        let right = if success { left } else { (left + 1) % m };
        let id = format!("g{i:05}");
        let mut rng = rng_for(config.seed, &format!("data.grasp.{i}"));
        let left_before = touch_texture(left, m, config.height, config.width, &mut rng);
        let right_before = touch_texture(right, m, config.height, config.width, &mut rng);
        let mut left_after = left_before.clone();
        let mut right_after = right_before.clone();
        stamp_contact(&mut left_after);
        stamp_contact(&mut right_after);
        if !success {
            left_after = smear(&left_after);
            right_after = smear(&right_after);
        }
        let outcome = if success { "successful" } else { "failed" };
        let hold = if success { "holding firm" } else { "slipping loose" };
        let sentence =
            format!("Grasp attempt {id} between two sensor pads was {outcome}, {hold} at release.");
        let phrases = vec![
            format!("{outcome} grip"),
            hold.to_string(),
            format!("attempt {id}"),
        ];
        let vision = vision_pattern(left, m, config.height, config.width, &mut rng);
        samples.push(Sample {
            id,
            touch_image: left_after.clone(),
            vision_image: vision,
            sentence_description: sentence,
            phrase_descriptions: phrases,
            labels: Labels {
                material: success as usize,
                hard_soft: success as u8,
                rough_smooth: success as u8,
            },
            grasp: Some(GraspObservation {
                frames: vec![left_before, right_before, left_after, right_after],
                success: success as u8,
            }),
            corruption_tag: None,
        });
    }
    let manifest = build_manifest("synthetic-grasp", config.seed, 2, &samples, |c| {
        if c == 0 { "failed".to_string() } else { "successful".to_string() }
    });
    Ok((manifest, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let cfg = SyntheticConfig { samples: 64, seed: 7, ..Default::default() };
        let (m1, s1) = generate_synthetic(&cfg).unwrap();
        let (m2, s2) = generate_synthetic(&cfg).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(s1.len(), s2.len());
        for (a, b) in s1.iter().zip(&s2) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.sentence_description, b.sentence_description);
            assert_eq!(a.phrase_descriptions, b.phrase_descriptions);
            assert_eq!(a.touch_image.as_raw(), b.touch_image.as_raw());
            assert_eq!(a.vision_image.as_raw(), b.vision_image.as_raw());
        }
    }

    #[test]
    fn corruption_count_is_exact_and_tagged() {
        let cfg = SyntheticConfig { samples: 64, corruption_rate: 0.25, ..Default::default() };
        let (_, samples) = generate_synthetic(&cfg).unwrap();
        let tagged: Vec<_> = samples.iter().filter(|s| s.corruption_tag.is_some()).collect();
        assert_eq!(tagged.len(), 16);
        for s in tagged {
            let kind = s.corruption_tag.as_deref().unwrap();
            assert!(DEFECT_KINDS.contains(&kind), "unknown tag {kind}");
        }
    }

    #[test]
    fn classes_are_balanced() {
        let cfg = SyntheticConfig { samples: 64, ..Default::default() };
        let (_, samples) = generate_synthetic(&cfg).unwrap();
        let mut counts = [0usize; 4];
        for s in &samples {
            counts[s.labels.material] += 1;
        }
        assert_eq!(counts, [16, 16, 16, 16]);
    }

    #[test]
    fn binary_labels_are_a_function_of_class() {
        let cfg = SyntheticConfig { samples: 40, ..Default::default() };
        let (_, samples) = generate_synthetic(&cfg).unwrap();
        for s in &samples {
            let e = material_lexicon(s.labels.material);
            assert_eq!(s.labels.hard_soft, e.hard as u8);
            assert_eq!(s.labels.rough_smooth, e.rough as u8);
        }
    }

    #[test]
    fn samples_validate_against_manifest() {
        let cfg = SyntheticConfig { samples: 16, corruption_rate: 0.2, ..Default::default() };
        let (manifest, samples) = generate_synthetic(&cfg).unwrap();
        let ids: Vec<String> = samples.iter().map(|s| s.id.clone()).collect();
        manifest.validate(&ids).unwrap();
        for s in &samples {
            s.validate(manifest.class_count()).unwrap();
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = SyntheticConfig { class_count: 1, ..Default::default() };
        assert!(generate_synthetic(&bad).is_err());
        let bad = SyntheticConfig { samples: 2, class_count: 4, ..Default::default() };
        assert!(generate_synthetic(&bad).is_err());
        let bad = SyntheticConfig { corruption_rate: 1.0, ..Default::default() };
        assert!(generate_synthetic(&bad).is_err());
        let bad = SyntheticConfig { height: 8, ..Default::default() };
        assert!(generate_synthetic(&bad).is_err());
    }

    #[test]
    fn grasp_records_have_four_frames_and_balanced_outcomes() {
        let cfg = GraspConfig { samples: 32, ..Default::default() };
        let (manifest, samples) = generate_grasp(&cfg).unwrap();
        assert_eq!(manifest.class_names, vec!["failed", "successful"]);
        let mut successes = 0;
        for s in &samples {
            let g = s.grasp.as_ref().unwrap();
            assert_eq!(g.frames.len(), 4);
            successes += g.success as usize;
            s.validate(2).unwrap();
        }
        assert_eq!(successes, 16);
    }
}
