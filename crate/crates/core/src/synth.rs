//! Seeded synthetic data for tests, examples and benchmarks.
//!
//! Headings are short, bold, larger and title case; body text is long,
//! regular weight and sentence case. With `noise = 0` the classes are
//! separable on the bold column alone.

use rand::seq::IndexedRandom;
use rand::Rng as _;

use crate::features::{FeatureVector, TextCase};
use crate::ingest::{escape_text, LabeledDataset};
use crate::rng::{rng_at, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub positive_fraction: f64,
    /// Probability of flipping each label after generation.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_rows: 500,
            positive_fraction: 0.2,
            noise: 0.0,
            seed: 0,
        }
    }
}

pub fn heading_vector(rng: &mut Rng) -> FeatureVector {
    let words = rng.random_range(1..=6u32);
    FeatureVector {
        characters: words * rng.random_range(5..=10u32) + words - 1,
        words,
        text_case: if rng.random_bool(0.8) { TextCase::Title } else { TextCase::Upper },
        bold: 1,
        font_flag: 1,
        verbs: rng.random_range(0..=1u32.min(words - 1)),
        nouns: rng.random_range(1..=words),
        adjectives: rng.random_range(0..=1),
        adverbs: 0,
        pronouns: 0,
        cardinals: rng.random_range(0..=1),
        coord_conj: rng.random_range(0..=1u32.min(words - 1)),
        predeterminers: 0,
        interjections: 0,
    }
}

pub fn body_vector(rng: &mut Rng) -> FeatureVector {
    let words = rng.random_range(8..=60u32);
    FeatureVector {
        characters: words * rng.random_range(4..=7u32) + words - 1,
        words,
        text_case: if rng.random_bool(0.9) { TextCase::Other } else { TextCase::Lower },
        bold: 0,
        font_flag: rng.random_bool(0.85) as u8,
        verbs: rng.random_range(1..=words / 4),
        nouns: rng.random_range(2..=words / 3),
        adjectives: rng.random_range(0..=words / 6),
        adverbs: rng.random_range(0..=words / 10),
        pronouns: rng.random_range(0..=words / 10),
        cardinals: rng.random_range(0..=2),
        coord_conj: rng.random_range(0..=words / 10),
        predeterminers: rng.random_range(0..=1),
        interjections: 0,
    }
}

/// Feature-level dataset with the canonical columns.
pub fn separable_dataset(cfg: &SynthConfig) -> LabeledDataset {
    let mut rng = rng_at(cfg.seed, &[0x5e7]);
    let mut ds = LabeledDataset::with_canonical_columns();
    let n_pos = (cfg.n_rows as f64 * cfg.positive_fraction).round() as usize;
    for i in 0..cfg.n_rows {
        let heading = i < n_pos;
        let v = if heading { heading_vector(&mut rng) } else { body_vector(&mut rng) };
        let flip = cfg.noise > 0.0 && rng.random_bool(cfg.noise);
        ds.push(&v.to_array(), (heading ^ flip) as u8).expect("canonical row");
    }
    ds
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDocument {
    pub doc_id: String,
    pub html: String,
    /// Span texts as extraction will see them, in document order.
    pub texts: Vec<String>,
    pub labels: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusConfig {
    pub n_docs: usize,
    pub min_sections: usize,
    pub max_sections: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_docs: 5,
            min_sections: 3,
            max_sections: 7,
            seed: 0,
        }
    }
}

const HEADING_WORDS: &[&str] = &[
    "Introduction", "Related", "Work", "Methods", "Data", "Results", "Discussion", "Conclusion",
    "Background", "Evaluation", "Experimental", "Setup", "Feature", "Selection", "Analysis",
    "Future", "Document", "Structure", "Model", "Training", "Overview", "Design",
];
const NOUNS: &[&str] = &[
    "model", "document", "study", "method", "result", "feature", "table", "section", "system",
    "dataset", "classifier", "paper", "value", "analysis", "reader", "student",
];
const VERBS: &[&str] = &["shows", "uses", "describes", "improves", "reports", "contains", "builds", "reduces"];
const ADJECTIVES: &[&str] = &["large", "simple", "new", "different", "important", "final", "small"];
const ADVERBS: &[&str] = &["clearly", "often", "quickly", "also", "usually"];

fn sentence(rng: &mut Rng) -> String {
    let mut s = format!(
        "The {} {} {} {} {}",
        NOUNS.choose(rng).unwrap(),
        VERBS.choose(rng).unwrap(),
        if rng.random_bool(0.5) { "the" } else { "a" },
        ADJECTIVES.choose(rng).unwrap(),
        NOUNS.choose(rng).unwrap(),
    );
    if rng.random_bool(0.4) {
        s.push_str(&format!(" and it {} {} {} {}", ADVERBS.choose(rng).unwrap(), VERBS.choose(rng).unwrap(), rng.random_range(2..100), "items"));
    }
    if rng.random_bool(0.3) {
        s.push_str(&format!(" in {} {}", NOUNS.choose(rng).unwrap(), rng.random_range(1..10)));
    }
    s.push('.');
    s
}

fn heading_text(rng: &mut Rng, number: usize) -> String {
    let n = rng.random_range(1..=3);
    let words: Vec<&str> = HEADING_WORDS.choose_multiple(rng, n).copied().collect();
    if rng.random_bool(0.5) {
        format!("{number} {}", words.join(" "))
    } else {
        words.join(" ")
    }
}

fn span_html(text: &str, size: u32, bold: bool) -> String {
    let family = if bold { "TimesNewRomanPS-BoldMT" } else { "TimesNewRomanPSMT" };
    format!(
        "<div style=\"position:absolute; border: textbox 1px solid;\"><span style=\"font-family: {family}; font-size:{size}px\">{}<br></span></div>\n",
        escape_text(text)
    )
}

/// Converter-style HTML documents with known heading labels.
pub fn synth_corpus(cfg: &CorpusConfig) -> Vec<SynthDocument> {
    (0..cfg.n_docs)
        .map(|d| {
            let mut rng = rng_at(cfg.seed, &[0xd0c, d as u64]);
            let mut html = String::from("<html><head><meta http-equiv=\"Content-Type\" content=\"text/html\"></head><body>\n");
            let mut texts = Vec::new();
            let mut labels = Vec::new();
            let mut push = |html: &mut String, text: String, size: u32, bold: bool, label: u8| {
                html.push_str(&span_html(&text, size, bold));
                texts.push(text);
                labels.push(label);
            };
            let title = heading_text(&mut rng, 0).trim_start_matches("0 ").to_string();
            push(&mut html, title, 18, true, 1);
            let sections = rng.random_range(cfg.min_sections..=cfg.max_sections.max(cfg.min_sections));
            for s in 1..=sections {
                push(&mut html, heading_text(&mut rng, s), 14, true, 1);
                for _ in 0..rng.random_range(1..=4) {
                    let body: Vec<String> = (0..rng.random_range(2..=5)).map(|_| sentence(&mut rng)).collect();
                    push(&mut html, body.join(" "), 10, false, 0);
                }
                if rng.random_bool(0.2) {
                    push(&mut html, sentence(&mut rng), 8, false, 0);
                }
            }
            html.push_str("</body></html>\n");
            SynthDocument {
                doc_id: format!("doc{d:03}"),
                html,
                texts,
                labels,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_NAMES;
    use crate::ingest::parse_html_spans;

    #[test]
    fn dataset_is_seeded_and_separable() {
        let cfg = SynthConfig { n_rows: 200, positive_fraction: 0.25, noise: 0.0, seed: 9 };
        let a = separable_dataset(&cfg);
        assert_eq!(a, separable_dataset(&cfg));
        assert_eq!(a.labels().iter().filter(|&&l| l == 1).count(), 50);
        let bold = FEATURE_NAMES.iter().position(|&n| n == "bold").unwrap();
        assert!((0..a.n_rows()).all(|i| a.value(i, bold) as u8 == a.label(i)));
    }

    #[test]
    fn corpus_extracts_to_the_intended_spans() {
        for doc in synth_corpus(&CorpusConfig { n_docs: 3, ..CorpusConfig::default() }) {
            let spans = parse_html_spans(&doc.html, &doc.doc_id).spans;
            let texts: Vec<&str> = spans.iter().map(|s| s.text.as_str()).collect();
            assert_eq!(texts, doc.texts.iter().map(String::as_str).collect::<Vec<_>>());
            for (s, &l) in spans.iter().zip(&doc.labels) {
                assert_eq!(s.bold, l == 1);
            }
        }
    }
}
