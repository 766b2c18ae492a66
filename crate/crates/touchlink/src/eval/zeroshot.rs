//! Zero-shot classification: nearest class prompt embedding by cosine.

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::{split_samples, touch_embeddings, EvalError, EvalReport, Protocol, TaskKind};
use crate::data::{DatasetManifest, Sample};
use crate::encoders::{encode_text, EncoderBundle, TextTransformer};

/// Prompt templates with a `{label}` slot plus the class label strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptTemplateSet {
    pub templates: Vec<String>,
    pub labels: Vec<String>,
}

impl PromptTemplateSet {
    /// Default touch-flavored templates.
    pub fn touch_defaults(labels: Vec<String>) -> Self {
        Self {
            templates: vec![
                "an object that feels {label}".into(),
                "a surface that is {label} to the touch".into(),
                "this texture feels {label}".into(),
            ],
            labels,
        }
    }

    /// Templates for grasp-outcome prediction.
    pub fn grasp_defaults(labels: Vec<String>) -> Self {
        Self {
            templates: vec![
                "a {label} grasp attempt".into(),
                "the gripper made a {label} grasp".into(),
                "tactile readings of a {label} grasp".into(),
            ],
            labels,
        }
    }

    pub fn for_task(task: TaskKind, manifest: &DatasetManifest) -> Self {
        let labels = task.class_names(manifest);
        match task {
            TaskKind::Grasp => Self::grasp_defaults(labels),
            _ => Self::touch_defaults(labels),
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.templates.is_empty() {
            return Err(EvalError::Config("prompt template set is empty".into()));
        }
        if self.labels.is_empty() {
            return Err(EvalError::Config("prompt label list is empty".into()));
        }
        for t in &self.templates {
            if t.matches("{label}").count() != 1 {
                return Err(EvalError::Config(format!(
                    "template '{t}' must contain the {{label}} slot exactly once"
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self, class: usize) -> Vec<String> {
        self.templates
            .iter()
            .map(|t| t.replace("{label}", &self.labels[class]))
            .collect()
    }
}

/// One embedding row per class: mean of the normalized template embeddings,
/// renormalized.
pub fn class_prompt_embeddings(
    set: &PromptTemplateSet,
    text: &TextTransformer,
) -> Result<Array2<f64>, EvalError> {
    set.validate()?;
    let d = text.embed_dim();
    let mut rows = Array2::zeros((set.labels.len(), d));
    for class in 0..set.labels.len() {
        let prompts = set.render(class);
        let refs: Vec<&str> = prompts.iter().map(String::as_str).collect();
        let emb = encode_text(text, &refs)?.into_normalized("prompt embeddings")?;
        let mean = emb.rows().mean_axis(Axis(0)).expect("non-empty template set");
        let norm = mean.dot(&mean).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(EvalError::Degenerate(format!(
                "class '{}' prompt embeddings cancel out",
                set.labels[class]
            )));
        }
        rows.row_mut(class).assign(&(&mean / norm));
    }
    Ok(rows)
}

/// Argmax over cosine similarity; ties break toward the lowest class index.
pub fn zero_shot_classify(query: ArrayView1<'_, f64>, class_rows: &Array2<f64>) -> usize {
    let qn = query.dot(&query).sqrt();
    let mut best = 0usize;
    let mut best_sim = f64::NEG_INFINITY;
    for (c, row) in class_rows.axis_iter(Axis(0)).enumerate() {
        let rn = row.dot(&row).sqrt();
        let sim = query.dot(&row) / (qn * rn);
        if sim > best_sim {
            best_sim = sim;
            best = c;
        }
    }
    best
}

/// The full protocol over one split.
pub fn zero_shot_report(
    bundle: &EncoderBundle,
    manifest: &DatasetManifest,
    samples: &[Sample],
    task: TaskKind,
    prompts: &PromptTemplateSet,
    eval_split: &str,
    checkpoint: &str,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    prompts.validate()?;
    let class_rows = class_prompt_embeddings(prompts, &bundle.text)?;
    let eval = split_samples(manifest, samples, eval_split)?;
    let x = touch_embeddings(bundle, &eval, task)?;
    let mut pairs = Vec::with_capacity(eval.len());
    for (i, s) in eval.iter().enumerate() {
        let truth = task.label_of(s)?;
        let pred = zero_shot_classify(x.row(i), &class_rows);
        pairs.push((truth, pred));
    }
    let confusion = EvalReport::tally(prompts.labels.len(), pairs);
    Ok(EvalReport::from_confusion(task, Protocol::ZeroShot, confusion, checkpoint, eval_split, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_query_picks_its_class() {
        let classes = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let q = array![0.0, 0.0, 1.0];
        assert_eq!(zero_shot_classify(q.view(), &classes), 2);
    }

    #[test]
    fn scaling_the_query_never_changes_the_argmax() {
        let classes = array![[0.8, 0.6], [0.6, -0.8], [-1.0, 0.0]];
        let q = array![0.3, 0.7];
        let base = zero_shot_classify(q.view(), &classes);
        for scale in [0.01, 10.0, 1234.5] {
            let scaled = &q * scale;
            assert_eq!(zero_shot_classify(scaled.view(), &classes), base);
        }
    }

    #[test]
    fn orthonormal_prompts_brute_force_example() {
        // Brute-force cosine over three orthonormal class rows for query
        // (0.1, 0.9, 0.2): class 1 wins.
        let classes = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let q: ndarray::Array1<f64> = array![0.1, 0.9, 0.2];
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for c in 0..3 {
            let row = classes.row(c);
            let sim = q.dot(&row) / (q.dot(&q).sqrt() * row.dot(&row).sqrt());
            if sim > best_sim {
                best_sim = sim;
                best = c;
            }
        }
        assert_eq!(best, 1);
        assert_eq!(zero_shot_classify(q.view(), &classes), 1);
    }

    #[test]
    fn ties_break_to_the_lowest_index() {
        let classes = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q = array![1.0, 0.0];
        assert_eq!(zero_shot_classify(q.view(), &classes), 0);
    }

    #[test]
    fn template_validation_requires_exactly_one_slot() {
        let mut set = PromptTemplateSet::touch_defaults(vec!["hard".into()]);
        set.templates.push("no slot here".into());
        assert!(set.validate().is_err());
        let mut set2 = PromptTemplateSet::touch_defaults(vec!["hard".into()]);
        set2.templates.push("{label} and {label}".into());
        assert!(set2.validate().is_err());
        let empty = PromptTemplateSet { templates: vec![], labels: vec!["a".into()] };
        assert!(empty.validate().is_err());
    }
}
