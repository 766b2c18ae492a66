//! The automatable portion of the dataset construction pipeline:
//! prompt-pool sampling for description generation, regex pattern
//! filtering, and consistency judging with a pluggable client. Flagged
//! records go to a human-review queue; nothing is deleted.

mod filter;
mod judge;

pub use filter::{pattern_filter, DefectFinding, DefectKind, FilterReport, Verdict};
pub use judge::{
    judge_from_env, ChatTransport, HttpJudge, JudgeClient, JudgeError, JudgeRequest, JudgeVerdict,
    MockJudge, UreqTransport,
};

use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{synthetic_attribute_words, DataError, DatasetManifest, Sample};
use crate::util::rng_for;

#[derive(Debug, Error)]
pub enum CurationError {
    #[error("prompt pool error: {0}")]
    Pool(String),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub const POOL_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Sentence,
    Phrase,
}

/// A pool of exactly sixteen generation prompts for one granularity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptPool {
    pub granularity: Granularity,
    pub prompts: Vec<String>,
}

#[derive(Deserialize)]
struct PoolFile {
    sentence: Vec<String>,
    phrase: Vec<String>,
}

const POOL_DATA: &str = include_str!("../../assets/prompt_pools.json");

impl PromptPool {
    pub fn new(granularity: Granularity, prompts: Vec<String>) -> Result<Self, CurationError> {
        if prompts.is_empty() {
            return Err(CurationError::Pool("prompt pool is empty".into()));
        }
        Ok(Self { granularity, prompts })
    }

    /// The shipped pools. Their size is structural: exactly sixteen
    /// prompts per granularity.
    pub fn shipped(granularity: Granularity) -> Self {
        let file: PoolFile = serde_json::from_str(POOL_DATA).expect("shipped pool data is valid");
        let prompts = match granularity {
            Granularity::Sentence => file.sentence,
            Granularity::Phrase => file.phrase,
        };
        assert_eq!(prompts.len(), POOL_SIZE, "shipped pools hold exactly {POOL_SIZE} prompts");
        Self { granularity, prompts }
    }

    /// Enforce the structural sixteen-prompt invariant (shipped pools
    /// always satisfy it; user-supplied pools are checked here).
    pub fn validate_size(&self) -> Result<(), CurationError> {
        if self.prompts.len() != POOL_SIZE {
            return Err(CurationError::Pool(format!(
                "{:?} pool holds {} prompts, expected exactly {POOL_SIZE}",
                self.granularity,
                self.prompts.len()
            )));
        }
        Ok(())
    }
}

/// Seeded uniform draw from the pool, deterministic in `(seed, index)`.
pub fn sample_prompt<'a>(
    pool: &'a PromptPool,
    seed: u64,
    index: usize,
) -> Result<&'a str, CurationError> {
    if pool.prompts.is_empty() {
        return Err(CurationError::Pool("cannot sample from an empty pool".into()));
    }
    let mut rng = rng_for(seed, &format!("curation.prompt.{index}"));
    let choice = rng.gen_range(0..pool.prompts.len());
    Ok(&pool.prompts[choice])
}

/// One record awaiting human review.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueueEntry {
    pub id: String,
    pub description: String,
    pub defects: Vec<String>,
    pub rationale: String,
}

#[derive(Debug)]
pub struct CurationOutcome {
    pub clean_ids: Vec<String>,
    pub queue: Vec<QueueEntry>,
}

impl CurationOutcome {
    pub fn queue_ids(&self) -> Vec<&str> {
        self.queue.iter().map(|e| e.id.as_str()).collect()
    }
}

/// Pattern-filter every record, then judge the survivors. Flagged or
/// inconsistent records land in the queue (in record order); inputs are
/// never mutated or dropped.
pub fn curate(
    manifest: &DatasetManifest,
    samples: &[Sample],
    client: &dyn JudgeClient,
) -> Result<CurationOutcome, CurationError> {
    let mut clean_ids = Vec::new();
    let mut queue = Vec::new();
    for sample in samples {
        let mut defects: Vec<String> = Vec::new();
        let report = pattern_filter(&sample.sentence_description).with_id(&sample.id);
        defects.extend(report.defect_names().iter().map(|s| s.to_string()));
        for phrase in &sample.phrase_descriptions {
            let phrase_report = pattern_filter(phrase);
            for name in phrase_report.defect_names() {
                if !defects.iter().any(|d| d == name) {
                    defects.push(name.to_string());
                }
            }
        }
        if !defects.is_empty() {
            queue.push(QueueEntry {
                id: sample.id.clone(),
                description: sample.sentence_description.clone(),
                defects,
                rationale: "pattern filter".into(),
            });
            continue;
        }
        let class = sample.labels.material;
        let attribute_words = synthetic_attribute_words(class);
        let request = JudgeRequest {
            sample_id: &sample.id,
            description: &sample.sentence_description,
            class_name: manifest
                .class_names
                .get(class)
                .map(String::as_str)
                .unwrap_or("unknown"),
            attribute_words: &attribute_words,
        };
        let verdict = client.judge(&request)?;
        if verdict.consistent {
            clean_ids.push(sample.id.clone());
        } else {
            queue.push(QueueEntry {
                id: sample.id.clone(),
                description: sample.sentence_description.clone(),
                defects: Vec::new(),
                rationale: verdict.rationale,
            });
        }
    }
    queue.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(CurationOutcome { clean_ids, queue })
}

/// Write the correction queue as one JSON object per line.
pub fn write_queue(path: &Path, queue: &[QueueEntry]) -> Result<(), CurationError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for entry in queue {
        let line = serde_json::to_string(entry)
            .map_err(|e| CurationError::Pool(format!("queue serialization: {e}")))?;
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticConfig};

    #[test]
    fn shipped_pools_hold_sixteen_prompts() {
        for granularity in [Granularity::Sentence, Granularity::Phrase] {
            let pool = PromptPool::shipped(granularity);
            assert_eq!(pool.prompts.len(), POOL_SIZE);
            pool.validate_size().unwrap();
        }
    }

    #[test]
    fn sample_prompt_is_deterministic() {
        let pool = PromptPool::shipped(Granularity::Sentence);
        let a = sample_prompt(&pool, 3, 17).unwrap();
        let b = sample_prompt(&pool, 3, 17).unwrap();
        assert_eq!(a, b);
        let c = sample_prompt(&pool, 3, 18).unwrap();
        let d = sample_prompt(&pool, 4, 17).unwrap();
        // Different index or seed is allowed to repeat, but across the pool
        // the draws must not be constant.
        let all: std::collections::BTreeSet<&str> = (0..64)
            .map(|i| sample_prompt(&pool, 3, i).unwrap())
            .collect();
        assert!(all.len() > 4, "draws look constant: {all:?}");
        let _ = (c, d);
    }

    #[test]
    fn sixteen_thousand_draws_are_near_uniform() {
        let pool = PromptPool::shipped(Granularity::Phrase);
        let mut counts = vec![0usize; POOL_SIZE];
        for i in 0..16_000 {
            let prompt = sample_prompt(&pool, 11, i).unwrap();
            let idx = pool.prompts.iter().position(|p| p == prompt).unwrap();
            counts[idx] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (880..=1120).contains(&c),
                "prompt {i} drawn {c} times, outside 1000 +/- 120"
            );
        }
    }

    #[test]
    fn pool_of_one_always_returns_it() {
        let pool = PromptPool::new(Granularity::Sentence, vec!["only".into()]).unwrap();
        for i in 0..20 {
            assert_eq!(sample_prompt(&pool, 9, i).unwrap(), "only");
        }
    }

    #[test]
    fn empty_pool_is_a_configuration_error() {
        assert!(PromptPool::new(Granularity::Sentence, vec![]).is_err());
    }

    #[test]
    fn all_clean_corpus_has_empty_queue() {
        let (manifest, samples) =
            generate_synthetic(&SyntheticConfig { samples: 12, ..Default::default() }).unwrap();
        let outcome = curate(&manifest, &samples, &MockJudge).unwrap();
        assert!(outcome.queue.is_empty());
        assert_eq!(outcome.clean_ids.len(), 12);
    }

    #[test]
    fn corrupted_records_land_in_the_queue_exactly() {
        let (manifest, samples) = generate_synthetic(&SyntheticConfig {
            samples: 64,
            corruption_rate: 0.25,
            ..Default::default()
        })
        .unwrap();
        let outcome = curate(&manifest, &samples, &MockJudge).unwrap();
        let tagged: std::collections::BTreeSet<&str> = samples
            .iter()
            .filter(|s| s.corruption_tag.is_some())
            .map(|s| s.id.as_str())
            .collect();
        let queued: std::collections::BTreeSet<&str> =
            outcome.queue.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(tagged, queued, "queue must be exactly the tagged records");
        assert_eq!(outcome.queue.len(), 16);
        // Partition: clean + queued = all, disjoint.
        assert_eq!(outcome.clean_ids.len() + outcome.queue.len(), samples.len());
        for id in &outcome.clean_ids {
            assert!(!queued.contains(id.as_str()));
        }
    }

    #[test]
    fn injected_defect_kind_matches_the_filter_family() {
        let (_, samples) = generate_synthetic(&SyntheticConfig {
            samples: 64,
            corruption_rate: 0.25,
            ..Default::default()
        })
        .unwrap();
        for s in samples.iter().filter(|s| s.corruption_tag.is_some()) {
            let tag = s.corruption_tag.as_deref().unwrap();
            let report = pattern_filter(&s.sentence_description);
            let names = report.defect_names();
            assert_eq!(names, vec![tag], "{}: expected only {tag}, got {names:?}", s.id);
        }
    }

    struct RejectEverything;
    impl JudgeClient for RejectEverything {
        fn judge(&self, _: &JudgeRequest<'_>) -> Result<JudgeVerdict, JudgeError> {
            Ok(JudgeVerdict { consistent: false, rationale: "always inconsistent".into() })
        }
        fn name(&self) -> &'static str {
            "reject"
        }
    }

    #[test]
    fn queue_is_union_of_flagged_and_inconsistent() {
        let (manifest, samples) = generate_synthetic(&SyntheticConfig {
            samples: 16,
            corruption_rate: 0.25,
            ..Default::default()
        })
        .unwrap();
        let outcome = curate(&manifest, &samples, &RejectEverything).unwrap();
        assert_eq!(outcome.queue.len(), samples.len());
        assert!(outcome.clean_ids.is_empty());
    }

    #[test]
    fn queue_round_trips_as_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("queue.jsonl");
        let queue = vec![QueueEntry {
            id: "s1".into(),
            description: "desc".into(),
            defects: vec!["redundancy".into()],
            rationale: "pattern filter".into(),
        }];
        write_queue(&path, &queue).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        let parsed: QueueEntry = serde_json::from_str(body.trim()).unwrap();
        assert_eq!(parsed.id, "s1");
    }
}
