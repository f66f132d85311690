//! The fourteen-feature representation of a span.
//!
//! Two features come from typography (boldness and a per-document font-size
//! flag), three from the surface of the text (characters, words, case) and
//! nine are part-of-speech frequencies.

mod pos;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::{LabeledDataset, RawSpan};

pub use pos::{pos_counts, pos_tag, tokenize, PosCounts, PosTag, Tagger};

/// Canonical column names, in feature-vector order.
pub const FEATURE_NAMES: [&str; 14] = [
    "characters",
    "words",
    "text_case",
    "bold",
    "font_flag",
    "verbs",
    "nouns",
    "adjectives",
    "adverbs",
    "pronouns",
    "cardinals",
    "coord_conj",
    "predeterminers",
    "interjections",
];

pub const N_FEATURES: usize = FEATURE_NAMES.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Feature {
    Characters,
    Words,
    TextCase,
    Bold,
    FontFlag,
    Verbs,
    Nouns,
    Adjectives,
    Adverbs,
    Pronouns,
    Cardinals,
    CoordConj,
    Predeterminers,
    Interjections,
}

/// How a column's values may be produced by interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// Non-negative counts and categorical codes; rounded half-up.
    Integer,
    /// 0/1 flags; rounded to the nearer of 0 and 1.
    Binary,
    /// Anything else; left as is.
    Real,
}

impl Feature {
    pub const ALL: [Feature; 14] = [
        Feature::Characters,
        Feature::Words,
        Feature::TextCase,
        Feature::Bold,
        Feature::FontFlag,
        Feature::Verbs,
        Feature::Nouns,
        Feature::Adjectives,
        Feature::Adverbs,
        Feature::Pronouns,
        Feature::Cardinals,
        Feature::CoordConj,
        Feature::Predeterminers,
        Feature::Interjections,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        FEATURE_NAMES[self.index()]
    }

    /// Human-readable label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Feature::Characters => "Characters",
            Feature::Words => "Words",
            Feature::TextCase => "Text Case",
            Feature::Bold => "Bold or Not",
            Feature::FontFlag => "Font Threshold Flag",
            Feature::Verbs => "Verbs",
            Feature::Nouns => "Nouns",
            Feature::Adjectives => "Adjectives",
            Feature::Adverbs => "Adverbs",
            Feature::Pronouns => "Pronouns",
            Feature::Cardinals => "Cardinal Numbers",
            Feature::CoordConj => "Coordinating Conjunctions",
            Feature::Predeterminers => "Predeterminers",
            Feature::Interjections => "Interjections",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Feature::ALL[i])
    }

    pub fn kind(self) -> ColumnKind {
        match self {
            Feature::Bold | Feature::FontFlag => ColumnKind::Binary,
            _ => ColumnKind::Integer,
        }
    }
}

/// Kind of a dataset column by name; unknown names are real-valued.
pub fn column_kind(name: &str) -> ColumnKind {
    Feature::from_name(name).map_or(ColumnKind::Real, Feature::kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum TextCase {
    Lower = 0,
    Upper = 1,
    Title = 2,
    Other = 3,
}

fn is_cased(c: char) -> bool {
    c.is_uppercase() || c.is_lowercase()
}

/// Classifies letter case, testing upper, lower, then title.
///
/// Title case means every whitespace-delimited word that starts with a
/// cased character starts with an uppercase one and has no further
/// uppercase characters. Text without cased characters is `Other`.
pub fn text_case(text: &str) -> TextCase {
    let mut cased = text.chars().filter(|&c| is_cased(c)).peekable();
    if cased.peek().is_none() {
        return TextCase::Other;
    }
    if text.chars().filter(|&c| is_cased(c)).all(char::is_uppercase) {
        return TextCase::Upper;
    }
    if text.chars().filter(|&c| is_cased(c)).all(char::is_lowercase) {
        return TextCase::Lower;
    }
    let title = text.split_whitespace().all(|word| {
        let mut chars = word.chars();
        match chars.next() {
            Some(first) if is_cased(first) => {
                first.is_uppercase() && chars.all(|c| !c.is_uppercase())
            }
            _ => true,
        }
    });
    if title {
        TextCase::Title
    } else {
        TextCase::Other
    }
}

/// Character-weighted font-size histogram and its modal size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentProfile {
    pub histogram: BTreeMap<u32, usize>,
    pub threshold: u32,
}

impl DocumentProfile {
    pub fn from_spans<'a>(spans: impl IntoIterator<Item = &'a RawSpan>) -> Result<Self> {
        let histogram = font_size_histogram(spans)?;
        let threshold = font_threshold(&histogram)?;
        Ok(Self {
            histogram,
            threshold,
        })
    }
}

/// Adds each span's trimmed character count to its font size's bucket.
pub fn font_size_histogram<'a>(
    spans: impl IntoIterator<Item = &'a RawSpan>,
) -> Result<BTreeMap<u32, usize>> {
    let mut hist = BTreeMap::new();
    let mut any = false;
    for span in spans {
        any = true;
        let n = span.text.trim().chars().count();
        if n > 0 {
            *hist.entry(span.font_size).or_insert(0) += n;
        }
    }
    if !any || hist.is_empty() {
        return Err(Error::NoSpans);
    }
    Ok(hist)
}

/// Size with the largest character count; ties go to the smaller size.
pub fn font_threshold(histogram: &BTreeMap<u32, usize>) -> Result<u32> {
    let mut best: Option<(u32, usize)> = None;
    for (&size, &count) in histogram {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((size, count));
        }
    }
    best.map(|(s, _)| s).ok_or(Error::NoSpans)
}

/// 0 when the span is smaller than the document threshold, else 1.
pub fn font_flag(span_size: u32, threshold: u32) -> u8 {
    u8::from(span_size >= threshold)
}

/// One span's features, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    pub characters: u32,
    pub words: u32,
    pub text_case: TextCase,
    pub bold: u8,
    pub font_flag: u8,
    pub verbs: u32,
    pub nouns: u32,
    pub adjectives: u32,
    pub adverbs: u32,
    pub pronouns: u32,
    pub cardinals: u32,
    pub coord_conj: u32,
    pub predeterminers: u32,
    pub interjections: u32,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.characters as f64,
            self.words as f64,
            self.text_case as u8 as f64,
            self.bold as f64,
            self.font_flag as f64,
            self.verbs as f64,
            self.nouns as f64,
            self.adjectives as f64,
            self.adverbs as f64,
            self.pronouns as f64,
            self.cardinals as f64,
            self.coord_conj as f64,
            self.predeterminers as f64,
            self.interjections as f64,
        ]
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.to_array()[feature.index()]
    }
}

/// Featurizes with the embedded tagger.
pub fn featurize(span: &RawSpan, profile: &DocumentProfile) -> FeatureVector {
    featurize_with(span, profile, Tagger::embedded())
}

pub fn featurize_with(span: &RawSpan, profile: &DocumentProfile, tagger: &Tagger) -> FeatureVector {
    let text = span.text.trim();
    let pos = pos_counts(&tagger.tag(&tokenize(text)));
    FeatureVector {
        characters: text.chars().count() as u32,
        words: text.split_whitespace().count() as u32,
        text_case: text_case(text),
        bold: u8::from(span.bold),
        font_flag: font_flag(span.font_size, profile.threshold),
        verbs: pos.verbs,
        nouns: pos.nouns,
        adjectives: pos.adjectives,
        adverbs: pos.adverbs,
        pronouns: pos.pronouns,
        cardinals: pos.cardinals,
        coord_conj: pos.coord_conj,
        predeterminers: pos.predeterminers,
        interjections: pos.interjections,
    }
}

/// Featurizes one document's spans against a profile built from all of
/// them. Output is ordered by `seq`.
pub fn featurize_document(spans: &[RawSpan], tagger: &Tagger) -> Result<Vec<(RawSpan, FeatureVector)>> {
    if spans.is_empty() {
        return Ok(Vec::new());
    }
    let profile = DocumentProfile::from_spans(spans)?;
    let mut ordered: Vec<&RawSpan> = spans.iter().collect();
    ordered.sort_by_key(|s| s.seq);
    Ok(ordered
        .into_iter()
        .map(|s| (s.clone(), featurize_with(s, &profile, tagger)))
        .collect())
}

/// Groups spans by document (first-appearance order), featurizes each
/// document, and returns vectors aligned with the input order.
pub fn featurize_corpus(spans: &[RawSpan], tagger: &Tagger) -> Result<Vec<FeatureVector>> {
    let mut doc_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut docs: Vec<Vec<usize>> = Vec::new();
    for (i, span) in spans.iter().enumerate() {
        let d = *doc_index.entry(span.doc_id.as_str()).or_insert_with(|| {
            docs.push(Vec::new());
            docs.len() - 1
        });
        docs[d].push(i);
    }
    let per_doc = exec::map(&docs, |members| -> Result<Vec<(usize, FeatureVector)>> {
        let profile = DocumentProfile::from_spans(members.iter().map(|&i| &spans[i]))?;
        Ok(members
            .iter()
            .map(|&i| (i, featurize_with(&spans[i], &profile, tagger)))
            .collect())
    });
    let mut out = vec![None; spans.len()];
    for doc in per_doc {
        for (i, v) in doc? {
            out[i] = Some(v);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("every span featurized")).collect())
}

/// Builds a dataset over the canonical columns.
pub fn to_dataset(vectors: &[FeatureVector], labels: &[u8]) -> Result<LabeledDataset> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: vectors.len(),
            right: labels.len(),
        });
    }
    let mut ds = LabeledDataset::with_canonical_columns();
    for (v, &l) in vectors.iter().zip(labels) {
        ds.push(&v.to_array(), l)?;
    }
    Ok(ds)
}
