use std::sync::LazyLock;

use regex::Regex;

use super::RawSpan;

// Opening tag with a pixel font size, then the lazily matched body up to the
// first closing span tag. The size capture accepts dots so that fractional
// sizes are seen (and rejected with a warning) instead of silently skipped.
static SPAN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?s)<\s*?span(?P<attrs>[^>]*font-size:(?P<size>[\w.]*)px[^>]*)>(?P<body>.*?)</span\b[^>]*>",
    )
    .unwrap()
});

static BOLD_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[Bb]old").unwrap());
static BREAK_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<br\s*/?>").unwrap());
static TAG_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseWarnings {
    /// Spans whose font-size capture was not a positive integer.
    pub bad_font_size: usize,
    /// Undecodable byte sequences replaced with U+FFFD.
    pub invalid_utf8: usize,
}

impl ParseWarnings {
    pub fn total(&self) -> usize {
        self.bad_font_size + self.invalid_utf8
    }

    pub fn merge(&mut self, other: ParseWarnings) {
        self.bad_font_size += other.bad_font_size;
        self.invalid_utf8 += other.invalid_utf8;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanExtraction {
    pub spans: Vec<RawSpan>,
    pub warnings: ParseWarnings,
}

/// True iff `bold` or `Bold` occurs anywhere in the opening-tag attributes.
pub fn detect_bold(opening_tag_attributes: &str) -> bool {
    BOLD_RE.is_match(opening_tag_attributes)
}

/// Extracts styled spans in document order.
///
/// Tags nested inside a span body are stripped (`<br>` becomes a space),
/// newlines become single spaces, the four basic entities are decoded and
/// the result is trimmed. Whitespace-only spans are dropped.
pub fn parse_html_spans(html: &str, doc_id: &str) -> SpanExtraction {
    let mut out = SpanExtraction::default();
    for caps in SPAN_RE.captures_iter(html) {
        let size = match parse_font_size(&caps["size"]) {
            Some(size) => size,
            None => {
                log::debug!("{doc_id}: skipping span with font-size `{}`", &caps["size"]);
                out.warnings.bad_font_size += 1;
                continue;
            }
        };
        let text = clean_body(&caps["body"]);
        if text.is_empty() {
            continue;
        }
        out.spans.push(RawSpan {
            doc_id: doc_id.to_string(),
            seq: out.spans.len(),
            text,
            font_size: size,
            bold: detect_bold(&caps["attrs"]),
        });
    }
    out
}

/// Decodes `bytes` as UTF-8 (lossily, counting replacements) and parses it.
pub fn parse_html_bytes(bytes: &[u8], doc_id: &str) -> SpanExtraction {
    let invalid = bytes
        .utf8_chunks()
        .filter(|chunk| !chunk.invalid().is_empty())
        .count();
    let html = String::from_utf8_lossy(bytes);
    let mut out = parse_html_spans(&html, doc_id);
    out.warnings.invalid_utf8 = invalid;
    out
}

fn parse_font_size(capture: &str) -> Option<u32> {
    if capture.is_empty() || !capture.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    capture.parse::<u32>().ok().filter(|&s| s >= 1)
}

fn clean_body(body: &str) -> String {
    let no_breaks = BREAK_RE.replace_all(body, " ");
    let no_tags = TAG_RE.replace_all(&no_breaks, "");
    let flat = no_tags.replace("\r\n", " ").replace(['\n', '\r'], " ");
    decode_entities(&flat).trim().to_string()
}

const ENTITIES: [(&str, char); 4] = [("&amp;", '&'), ("&lt;", '<'), ("&gt;", '>'), ("&quot;", '"')];

/// Single-pass decoding of `&amp; &lt; &gt; &quot;`; anything else is kept.
pub fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        match ENTITIES.iter().find(|(name, _)| rest.starts_with(name)) {
            Some((name, ch)) => {
                out.push(*ch);
                rest = &rest[name.len()..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Inverse of [`decode_entities`] for the characters it produces.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_span() {
        let out = parse_html_spans(r#"<span style="font-size:12px">Introduction</span>"#, "d");
        assert_eq!(
            out.spans,
            vec![RawSpan {
                doc_id: "d".into(),
                seq: 0,
                text: "Introduction".into(),
                font_size: 12,
                bold: false,
            }]
        );
        assert_eq!(out.warnings, ParseWarnings::default());
    }

    #[test]
    fn empty_input() {
        assert!(parse_html_spans("", "d").spans.is_empty());
    }

    #[test]
    fn bold_from_font_family() {
        let html = concat!(
            r#"<span style="font-family:ArialBold; font-size:9px">Course Goals</span>"#,
            r#"<span style="font-size:9px">This course…</span>"#
        );
        let spans = parse_html_spans(html, "d").spans;
        assert_eq!(spans.len(), 2);
        assert_eq!((spans[0].font_size, spans[0].bold), (9, true));
        assert_eq!((spans[1].font_size, spans[1].bold), (9, false));
        assert_eq!(spans[1].text, "This course…");
        assert_eq!((spans[0].seq, spans[1].seq), (0, 1));
    }

    #[test]
    fn detect_bold_is_a_plain_substring_match() {
        assert!(detect_bold("font-family:Times-Bold; font-size:14px"));
        assert!(!detect_bold("font-size:9px"));
        assert!(detect_bold("font-family:boldoni"));
        assert!(!detect_bold("font-family:BOLD"));
    }

    #[test]
    fn nested_tags_newlines_and_entities() {
        let html = "<span style=\"font-family: Helvetica; font-size:10px\">Tools &amp; <b>Tips</b><br>\nfor &lt;PDF&gt;\r\n</span>";
        let spans = parse_html_spans(html, "d").spans;
        assert_eq!(spans[0].text, "Tools & Tips  for <PDF>");
        assert!(!spans[0].bold, "boldness only comes from the opening tag");
    }

    #[test]
    fn entity_decoding_is_single_pass() {
        assert_eq!(decode_entities("&amp;lt; &quot;x&quot; &nbsp;"), "&lt; \"x\" &nbsp;");
    }

    #[test]
    fn whitespace_only_spans_are_dropped_and_seq_stays_dense() {
        let html = concat!(
            r#"<span style="font-size:9px">  </span>"#,
            r#"<span style="font-size:9px">a</span>"#,
            r#"<span style="font-size:9px"><br></span>"#,
            r#"<span style="font-size:9px">b</span>"#
        );
        let spans = parse_html_spans(html, "d").spans;
        let seqs: Vec<_> = spans.iter().map(|s| (s.seq, s.text.as_str())).collect();
        assert_eq!(seqs, vec![(0, "a"), (1, "b")]);
    }

    #[test]
    fn bad_font_sizes_are_counted_not_fatal() {
        let html = concat!(
            r#"<span style="font-size:12.5px">half</span>"#,
            r#"<span style="font-size:bigpx">word</span>"#,
            r#"<span style="font-size:0px">zero</span>"#,
            r#"<span style="font-size:11px">ok</span>"#
        );
        let out = parse_html_spans(html, "d");
        assert_eq!(out.spans.len(), 1);
        assert_eq!(out.spans[0].text, "ok");
        assert_eq!(out.warnings.bad_font_size, 3);
    }

    #[test]
    fn spans_without_font_size_are_ignored() {
        let html = r#"<div><span style="color:red">x</span><span class="a" style="font-size:8px">y</span></div>"#;
        let spans = parse_html_spans(html, "d").spans;
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].text, "y");
    }

    #[test]
    fn pdfminer_style_markup() {
        let html = r#"<div style="position:absolute; border: textbox 1px solid; writing-mode:lr-tb; left:72px; top:100px; width:200px; height:14px;"><span style="font-family: Calibri-Bold; font-size:14px">Learning Outcomes
<br></span><span style="font-family: Calibri; font-size:11px">By the end of this course,
students will be able to:
<br></span></div>"#;
        let spans = parse_html_spans(html, "course").spans;
        assert_eq!(spans.len(), 2);
        assert_eq!(spans[0].text, "Learning Outcomes");
        assert!(spans[0].bold);
        assert_eq!(spans[0].font_size, 14);
        assert_eq!(
            spans[1].text,
            "By the end of this course, students will be able to:"
        );
    }

    #[test]
    fn invalid_utf8_is_replaced_and_counted() {
        let mut bytes = br#"<span style="font-size:9px">caf"#.to_vec();
        bytes.push(0xff);
        bytes.extend_from_slice(b"</span>");
        let out = parse_html_bytes(&bytes, "d");
        assert_eq!(out.spans[0].text, "caf\u{fffd}");
        assert_eq!(out.warnings.invalid_utf8, 1);
    }

    proptest! {
        #[test]
        fn reembedded_spans_reparse_equal(
            text in "[ -~äé…]{1,40}",
            size in 1u32..200,
            bold in any::<bool>(),
        ) {
            let text = text.trim().to_string();
            prop_assume!(!text.is_empty());
            let family = if bold { "Arial-Bold" } else { "Arial" };
            let html = format!(
                r#"<span style="font-family:{family}; font-size:{size}px">{}</span>"#,
                escape_text(&text)
            );
            let spans = parse_html_spans(&html, "p").spans;
            prop_assert_eq!(spans.len(), 1);
            prop_assert_eq!(&spans[0].text, &text);
            prop_assert_eq!(spans[0].font_size, size);
            prop_assert_eq!(spans[0].bold, bold);
        }

        #[test]
        fn parsing_is_deterministic(html in ".{0,200}") {
            prop_assert_eq!(parse_html_spans(&html, "x"), parse_html_spans(&html, "x"));
        }
    }
}
