//! Regex pattern filtering over generated descriptions.
//!
//! Three rule families, matching the defect classes the curation pipeline
//! screens for:
//! (a) multilanguage confusion — code points outside printable ASCII;
//! (b) special markers — markup remnants such as asterisk runs, angle
//!     bracket tags, backticks, or chat role prefixes at line starts;
//! (c) semantic redundancy — a sentence repeated verbatim after
//!     normalization, or any 6-word shingle occurring three or more times.
//!
//! The filter is total (never errors) and reports every defect with byte
//! spans into the description.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    Multilanguage,
    SpecialMarker,
    Redundancy,
}

impl DefectKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Multilanguage => "multilanguage",
            Self::SpecialMarker => "special_marker",
            Self::Redundancy => "redundancy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Clean,
    Flagged,
}

/// One defect family with the byte spans where it fired.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectFinding {
    pub kind: DefectKind,
    /// Half-open byte ranges into the description.
    pub spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterReport {
    pub sample_id: String,
    pub verdict: Verdict,
    pub defects: Vec<DefectFinding>,
}

impl FilterReport {
    fn new(defects: Vec<DefectFinding>) -> Self {
        let verdict = if defects.is_empty() { Verdict::Clean } else { Verdict::Flagged };
        Self { sample_id: String::new(), verdict, defects }
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.sample_id = id.to_string();
        self
    }

    pub fn is_clean(&self) -> bool {
        self.verdict == Verdict::Clean
    }

    pub fn defect_names(&self) -> Vec<&'static str> {
        self.defects.iter().map(|d| d.kind.name()).collect()
    }
}

fn marker_patterns() -> &'static [Regex] {
    static PATTERNS: OnceLock<Vec<Regex>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        vec![
            Regex::new(r"\*{2,}").expect("valid regex"),
            Regex::new(r"`+").expect("valid regex"),
            Regex::new(r"<[^<>\n]{1,64}>").expect("valid regex"),
            Regex::new(r"(?m)^\s*(AI|Assistant|System|User|Human|Model)\s*:").expect("valid regex"),
        ]
    })
}

fn multilanguage_spans(text: &str) -> Vec<(usize, usize)> {
    // Contiguous runs of non-ASCII code points.
    let mut spans = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (idx, ch) in text.char_indices() {
        let end = idx + ch.len_utf8();
        if ch.is_ascii() {
            if let Some(span) = current.take() {
                spans.push(span);
            }
        } else {
            current = Some(match current {
                Some((start, _)) => (start, end),
                None => (idx, end),
            });
        }
    }
    if let Some(span) = current {
        spans.push(span);
    }
    spans
}

fn normalize_sentence(raw: &str) -> String {
    raw.split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| c.is_alphanumeric())
                .collect::<String>()
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn redundancy_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();

    // Verbatim repeated sentences (after normalization).
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut start = 0usize;
    for (idx, ch) in text.char_indices() {
        let is_terminal = matches!(ch, '.' | '!' | '?');
        let end = idx + ch.len_utf8();
        if is_terminal || end == text.len() {
            let sentence = &text[start..end];
            let normalized = normalize_sentence(sentence);
            if !normalized.is_empty() {
                let count = seen.entry(normalized).or_insert(0);
                *count += 1;
                if *count >= 2 {
                    spans.push((start, end));
                }
            }
            start = end;
        }
    }

    // 6-word shingles occurring three or more times.
    let words: Vec<(usize, usize, String)> = split_words(text);
    if words.len() >= 6 {
        let mut counts: HashMap<String, Vec<usize>> = HashMap::new();
        for i in 0..=words.len() - 6 {
            let shingle = words[i..i + 6]
                .iter()
                .map(|(_, _, w)| w.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            counts.entry(shingle).or_default().push(i);
        }
        for (_, starts) in counts {
            if starts.len() >= 3 {
                let i = *starts.last().expect("non-empty");
                spans.push((words[i].0, words[i + 5].1));
            }
        }
    }
    spans.sort_unstable();
    spans.dedup();
    spans
}

fn split_words(text: &str) -> Vec<(usize, usize, String)> {
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            start.get_or_insert(idx);
        } else if let Some(s) = start.take() {
            words.push((s, idx, text[s..idx].to_lowercase()));
        }
    }
    if let Some(s) = start {
        words.push((s, text.len(), text[s..].to_lowercase()));
    }
    words
}

/// Apply all three rule families. Total: any UTF-8 string gets a report.
pub fn pattern_filter(description: &str) -> FilterReport {
    let mut defects = Vec::new();

    let ml = multilanguage_spans(description);
    if !ml.is_empty() {
        defects.push(DefectFinding { kind: DefectKind::Multilanguage, spans: ml });
    }

    let mut marker_spans: Vec<(usize, usize)> = Vec::new();
    for pattern in marker_patterns() {
        for m in pattern.find_iter(description) {
            marker_spans.push((m.start(), m.end()));
        }
    }
    if !marker_spans.is_empty() {
        marker_spans.sort_unstable();
        marker_spans.dedup();
        defects.push(DefectFinding { kind: DefectKind::SpecialMarker, spans: marker_spans });
    }

    let red = redundancy_spans(description);
    if !red.is_empty() {
        defects.push(DefectFinding { kind: DefectKind::Redundancy, spans: red });
    }

    FilterReport::new(defects)
}
