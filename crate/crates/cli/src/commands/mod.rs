mod apply;
mod data;
mod select;
mod train;

pub use apply::{cmd_bench, cmd_evaluate, cmd_predict, cmd_segment, load_trained, score_spans, segment_spans, EvaluateArgs};
pub use data::{cmd_balance, cmd_extract, cmd_featurize};
pub use select::{cmd_grid_search, cmd_select_features, GridArgs, SelectArgs};
pub use train::{cmd_train, run_pipeline, stratified_split, GridSummary, HoldoutSummary, RowCounts, TrainOutcome, TrainReport};

use std::path::{Path, PathBuf};

use anyhow::anyhow;
use headingdet_core::exec;
use headingdet_core::features::{featurize_corpus, to_dataset, Tagger};
use headingdet_core::ingest::{
    detect_schema, load_feature_dataset, load_text_dataset, parse_html_bytes, LabelPolicy,
    LabeledDataset, ParseWarnings, RawSpan, Schema, SpanRecord,
};
use walkdir::WalkDir;

use crate::config::PipelineConfig;
use crate::error::{input, stage, usage, CliResult};

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: PipelineConfig,
    pub quiet: bool,
}

impl Context {
    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn is_html(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
}

/// Expands directories to the HTML files below them, sorted by path.
pub fn html_files(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(p)
                .into_iter()
                .filter_map(|e| e.ok())
                .filter(|e| e.file_type().is_file() && is_html(e.path()))
                .map(|e| e.into_path())
                .collect();
            found.sort();
            files.extend(found);
        } else if p.exists() {
            files.push(p.clone());
        } else {
            return Err(input(anyhow!("{}: no such file or directory", p.display())));
        }
    }
    if files.is_empty() {
        return Err(input(anyhow!("no HTML files found")));
    }
    Ok(files)
}

pub struct Extracted {
    pub spans: Vec<RawSpan>,
    pub warnings: ParseWarnings,
    pub ok_files: usize,
    pub failed: Vec<(PathBuf, String)>,
}

/// Extracts spans from every file, in file order. The path string is the
/// document id.
pub fn extract_files(files: &[PathBuf]) -> Extracted {
    let results = exec::map(files, |path| {
        std::fs::read(path)
            .map_err(|e| e.to_string())
            .map(|bytes| parse_html_bytes(&bytes, &path.to_string_lossy()))
    });
    let mut out = Extracted {
        spans: Vec::new(),
        warnings: ParseWarnings::default(),
        ok_files: 0,
        failed: Vec::new(),
    };
    for (path, r) in files.iter().zip(results) {
        match r {
            Ok(x) if x.spans.is_empty() => out.failed.push((path.clone(), "no spans".into())),
            Ok(x) => {
                out.ok_files += 1;
                out.warnings.merge(x.warnings);
                out.spans.extend(x.spans);
            }
            Err(e) => out.failed.push((path.clone(), e)),
        }
    }
    for (path, why) in &out.failed {
        log::warn!("{}: {why}", path.display());
    }
    if out.warnings.total() > 0 {
        log::warn!(
            "{} parse warnings ({} bad font sizes, {} invalid UTF-8 sequences)",
            out.warnings.total(),
            out.warnings.bad_font_size,
            out.warnings.invalid_utf8
        );
    }
    out
}

/// Spans from either one text-mode CSV or a set of HTML files/directories.
pub fn load_spans(inputs: &[PathBuf]) -> CliResult<Vec<SpanRecord>> {
    if let [single] = inputs {
        if single.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            let records = load_text_dataset(single, LabelPolicy::Optional).map_err(input)?;
            if records.is_empty() {
                return Err(input(anyhow!("{}: no rows", single.display())));
            }
            return Ok(records);
        }
    }
    let extracted = extract_files(&html_files(inputs)?);
    if extracted.ok_files == 0 {
        return Err(input(anyhow!("no spans could be extracted from the inputs")));
    }
    Ok(extracted
        .spans
        .into_iter()
        .map(|span| SpanRecord { span, label: None })
        .collect())
}

/// Loads a labeled text- or feature-mode CSV as a feature dataset.
pub fn load_labeled(path: &Path, tagger: &Tagger) -> CliResult<LabeledDataset> {
    let ds = match detect_schema(path).map_err(input)? {
        Schema::Feature => load_feature_dataset(path).map_err(input)?,
        Schema::Text => {
            let records = load_text_dataset(path, LabelPolicy::Required).map_err(input)?;
            let spans: Vec<RawSpan> = records.iter().map(|r| r.span.clone()).collect();
            let labels: Vec<u8> = records.iter().map(|r| r.label.unwrap_or(0)).collect();
            let vectors = featurize_corpus(&spans, tagger).map_err(stage("featurize"))?;
            let mut ds = to_dataset(&vectors, &labels).map_err(stage("featurize"))?;
            ds.provenance = Some(path.to_path_buf());
            ds
        }
    };
    if ds.is_empty() {
        return Err(input(anyhow!("{}: no rows", path.display())));
    }
    Ok(ds)
}

/// Column indices for `names`, in canonical order.
pub fn feature_mask(ds: &LabeledDataset, names: Option<&[String]>) -> CliResult<Vec<usize>> {
    match names {
        None => Ok((0..ds.n_cols()).collect()),
        Some(names) => {
            let mut mask = Vec::with_capacity(names.len());
            for n in names {
                let j = ds.column_index(n).ok_or_else(|| {
                    usage(format!("unknown feature `{n}` (known: {})", ds.columns().join(", ")))
                })?;
                mask.push(j);
            }
            mask.sort_unstable();
            mask.dedup();
            if mask.is_empty() {
                return Err(usage("feature list is empty"));
            }
            Ok(mask)
        }
    }
}

pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(stage("write"))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| stage("write")(anyhow!("{}: {e}", path.display())))
}
