//! Heading-rooted segmentation of a document.

use headingdet_core::ingest::RawSpan;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub seq: usize,
    pub text: String,
    pub font_size: u32,
    pub bold: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub heading: SegmentSpan,
    pub body: Vec<SegmentSpan>,
}

/// A document split into leading body text plus one section per heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionTree {
    pub doc_id: String,
    pub preamble: Vec<SegmentSpan>,
    pub sections: Vec<Section>,
}

impl SectionTree {
    /// Every span in document order.
    pub fn spans(&self) -> impl Iterator<Item = &SegmentSpan> {
        self.preamble.iter().chain(
            self.sections
                .iter()
                .flat_map(|s| std::iter::once(&s.heading).chain(&s.body)),
        )
    }
}

/// Spans labelled 1 open a section; the rest attach to the open section, or
/// to the preamble before the first heading. `spans` are one document's,
/// in reading order.
pub fn segment(doc_id: &str, spans: &[RawSpan], labels: &[u8], scores: &[f64]) -> SectionTree {
    let mut tree = SectionTree {
        doc_id: doc_id.to_string(),
        preamble: Vec::new(),
        sections: Vec::new(),
    };
    for ((span, &label), &score) in spans.iter().zip(labels).zip(scores) {
        let s = SegmentSpan {
            seq: span.seq,
            text: span.text.clone(),
            font_size: span.font_size,
            bold: span.bold,
            score,
        };
        if label == 1 {
            tree.sections.push(Section {
                heading: s,
                body: Vec::new(),
            });
        } else if let Some(open) = tree.sections.last_mut() {
            open.body.push(s);
        } else {
            tree.preamble.push(s);
        }
    }
    tree
}
