use std::path::{Path, PathBuf};

use anyhow::anyhow;
use headingdet_core::features::{featurize_corpus, to_dataset};
use headingdet_core::ingest::{
    load_text_dataset, write_feature_dataset, write_text_dataset, LabelPolicy, RawSpan, SpanRecord,
};
use headingdet_core::resample::{class_counts, smote, SmoteParams};

use super::{extract_files, html_files, load_labeled, Context};
use crate::error::{input, stage, CliResult};

pub fn cmd_extract(ctx: &Context, inputs: &[PathBuf], out: &Path) -> CliResult<()> {
    let files = html_files(inputs)?;
    let ex = extract_files(&files);
    if ex.ok_files == 0 {
        return Err(input(anyhow!("none of the {} input files yielded spans", files.len())));
    }
    let records: Vec<SpanRecord> = ex
        .spans
        .into_iter()
        .map(|span| SpanRecord { span, label: None })
        .collect();
    write_text_dataset(&records, out).map_err(stage("write"))?;
    ctx.say(format!(
        "extracted {} spans from {} of {} files ({} warnings) -> {}",
        records.len(),
        ex.ok_files,
        files.len(),
        ex.warnings.total(),
        out.display()
    ));
    Ok(())
}

pub fn cmd_featurize(ctx: &Context, data: &Path, out: &Path) -> CliResult<()> {
    let tagger = ctx.config.tagger()?;
    let records = load_text_dataset(data, LabelPolicy::Required).map_err(input)?;
    if records.is_empty() {
        return Err(input(anyhow!("{}: no rows", data.display())));
    }
    let spans: Vec<RawSpan> = records.iter().map(|r| r.span.clone()).collect();
    let labels: Vec<u8> = records.iter().map(|r| r.label.unwrap_or(0)).collect();
    let vectors = featurize_corpus(&spans, &tagger).map_err(stage("featurize"))?;
    let ds = to_dataset(&vectors, &labels).map_err(stage("featurize"))?;
    write_feature_dataset(&ds, out).map_err(stage("write"))?;
    ctx.say(format!("featurized {} spans -> {}", ds.n_rows(), out.display()));
    Ok(())
}

pub fn cmd_balance(ctx: &Context, data: &Path, out: &Path, k_neighbors: Option<usize>) -> CliResult<()> {
    let ds = load_labeled(data, &ctx.config.tagger()?)?;
    let params = SmoteParams {
        k_neighbors: k_neighbors.unwrap_or(ctx.config.smote.k_neighbors),
        seed: ctx.config.seed,
    };
    let balanced = smote(&ds, &params).map_err(stage("smote"))?;
    write_feature_dataset(&balanced, out).map_err(stage("write"))?;
    let (n0, n1) = class_counts(ds.labels());
    let (b0, b1) = class_counts(balanced.labels());
    ctx.say(format!("balanced {n0}/{n1} -> {b0}/{b1} (negative/positive) -> {}", out.display()));
    Ok(())
}
