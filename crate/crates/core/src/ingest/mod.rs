//! Span extraction from converter HTML and CSV dataset I/O.

mod dataset;
mod html;

pub use dataset::{
    detect_schema, load_dataset, load_feature_dataset, load_text_dataset, write_dataset,
    write_feature_dataset, write_text_dataset, Dataset, LabelPolicy, LabeledDataset, Schema,
    SpanRecord, FEATURE_HEADER, TEXT_HEADER,
};
pub use html::{
    decode_entities, detect_bold, escape_text, parse_html_bytes, parse_html_spans,
    ParseWarnings, SpanExtraction,
};

use serde::{Deserialize, Serialize};

/// One run of uniformly styled text pulled out of a `<span>` element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawSpan {
    pub doc_id: String,
    /// 0-based extraction order within the document.
    pub seq: usize,
    pub text: String,
    /// Pixels, always at least 1.
    pub font_size: u32,
    pub bold: bool,
}
