#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use headingdet_core::ingest::{parse_html_spans, write_text_dataset, SpanRecord};
use headingdet_core::synth::{synth_corpus, CorpusConfig};

pub fn headingdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_headingdet"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn headingdet")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub struct Corpus {
    pub html_dir: PathBuf,
    pub html_files: Vec<PathBuf>,
    /// Labeled text-mode CSV of every span.
    pub labeled: PathBuf,
    pub n_spans: usize,
}

/// Writes `n_docs` synthetic documents under `dir`.
pub fn write_corpus(dir: &Path, n_docs: usize, seed: u64) -> Corpus {
    let html_dir = dir.join("html");
    std::fs::create_dir_all(&html_dir).unwrap();
    let docs = synth_corpus(&CorpusConfig {
        n_docs,
        seed,
        ..CorpusConfig::default()
    });
    let mut records = Vec::new();
    let mut html_files = Vec::new();
    for doc in &docs {
        let path = html_dir.join(format!("{}.html", doc.doc_id));
        std::fs::write(&path, &doc.html).unwrap();
        let ex = parse_html_spans(&doc.html, &path.to_string_lossy());
        assert_eq!(ex.spans.len(), doc.labels.len());
        records.extend(
            ex.spans
                .into_iter()
                .zip(&doc.labels)
                .map(|(span, &l)| SpanRecord { span, label: Some(l) }),
        );
        html_files.push(path);
    }
    let labeled = dir.join("labeled.csv");
    write_text_dataset(&records, &labeled).unwrap();
    Corpus {
        html_dir,
        html_files,
        labeled,
        n_spans: records.len(),
    }
}
