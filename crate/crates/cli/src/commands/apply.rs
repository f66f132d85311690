//! Commands that use a trained model: evaluate, predict, segment, bench.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use headingdet_core::classifiers::{load_model, ClassifierKind, TrainedModel};
use headingdet_core::evaluation::{
    evaluate, format_metrics_table, timing_benchmark, write_metrics_csv, write_roc_csv, write_timing_csv,
    EvaluationReport, Timing,
};
use headingdet_core::features::{featurize_corpus, to_dataset};
use headingdet_core::ingest::RawSpan;

use super::{load_labeled, load_spans, write_json, Context};
use crate::error::{input, stage, usage, CliResult};
use crate::segment::{segment, SectionTree};

pub fn load_trained(path: &Path) -> CliResult<TrainedModel> {
    load_model(path).map_err(|e| input(anyhow!("{}: {e}", path.display())))
}

pub struct EvaluateArgs<'a> {
    pub model: &'a Path,
    pub data: &'a Path,
    pub json: Option<&'a Path>,
    pub roc: Option<&'a Path>,
    pub metrics: Option<&'a Path>,
}

pub fn cmd_evaluate(ctx: &Context, args: &EvaluateArgs) -> CliResult<EvaluationReport> {
    let model = load_trained(args.model)?;
    let ds = load_labeled(args.data, &ctx.config.tagger()?)?;
    if ds.columns() != model.columns.as_slice() {
        return Err(input(anyhow!(
            "{}: columns [{}] do not match the model's [{}]",
            args.data.display(),
            ds.columns().join(", "),
            model.columns.join(", ")
        )));
    }
    let report = evaluate(&model, &ds).map_err(stage("evaluate"))?;
    let rows = vec![(model.kind().display_name().to_string(), report.metrics.clone(), report.auc())];
    if let Some(p) = args.json {
        write_json(&report, p)?;
    }
    if let Some(p) = args.metrics {
        write_metrics_csv(&rows, p).map_err(stage("write"))?;
    }
    if let (Some(p), Some(roc)) = (args.roc, &report.roc) {
        write_roc_csv(roc, p).map_err(stage("write"))?;
    }
    let cm = &report.confusion;
    ctx.say(format_metrics_table(&rows));
    ctx.say(format!(
        "{} points  tp {}  fn {}  tn {}  fp {}",
        report.n_points, cm.tp, cm.fn_, cm.tn, cm.fp
    ));
    if !report.metrics.undefined.is_empty() {
        ctx.say(format!("undefined (reported as 0): {}", report.metrics.undefined.join(", ")));
    }
    Ok(report)
}

/// Per-span labels and scores, aligned with `spans`.
pub fn score_spans(ctx: &Context, model: &TrainedModel, spans: &[RawSpan]) -> CliResult<(Vec<u8>, Vec<f64>)> {
    let vectors = featurize_corpus(spans, &ctx.config.tagger()?).map_err(stage("featurize"))?;
    let ds = to_dataset(&vectors, &vec![0; vectors.len()]).map_err(stage("featurize"))?;
    let scores = model.score_dataset(&ds).map_err(input)?;
    let labels = scores.iter().map(|&s| (s > 0.5) as u8).collect();
    Ok((labels, scores))
}

fn open_output(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| stage("write")(anyhow!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn load_spans_only(inputs: &[PathBuf]) -> CliResult<Vec<RawSpan>> {
    Ok(load_spans(inputs)?.into_iter().map(|r| r.span).collect())
}

pub fn cmd_predict(ctx: &Context, model: &Path, inputs: &[PathBuf], out: Option<&Path>) -> CliResult<()> {
    let model = load_trained(model)?;
    let spans = load_spans_only(inputs)?;
    let (labels, scores) = score_spans(ctx, &model, &spans)?;
    let mut w = csv::Writer::from_writer(open_output(out)?);
    let write = |w: &mut csv::Writer<_>| -> csv::Result<()> {
        w.write_record(["doc_id", "seq", "text", "label", "score"])?;
        for ((s, l), sc) in spans.iter().zip(&labels).zip(&scores) {
            w.write_record([
                s.doc_id.clone(),
                s.seq.to_string(),
                s.text.clone(),
                l.to_string(),
                sc.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).map_err(stage("write"))?;
    if let Some(p) = out {
        let n_head = labels.iter().filter(|&&l| l == 1).count();
        ctx.say(format!("{} spans, {} predicted headings -> {}", spans.len(), n_head, p.display()));
    }
    Ok(())
}

/// Splits spans into runs sharing a doc id, in order of first appearance.
fn group_documents(spans: &[RawSpan]) -> Vec<(String, Vec<usize>)> {
    let mut docs: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, s) in spans.iter().enumerate() {
        match docs.iter_mut().find(|(id, _)| *id == s.doc_id) {
            Some((_, members)) => members.push(i),
            None => docs.push((s.doc_id.clone(), vec![i])),
        }
    }
    for (_, members) in &mut docs {
        members.sort_by_key(|&i| spans[i].seq);
    }
    docs
}

pub fn segment_spans(spans: &[RawSpan], labels: &[u8], scores: &[f64]) -> Vec<SectionTree> {
    group_documents(spans)
        .into_iter()
        .map(|(doc_id, members)| {
            let s: Vec<RawSpan> = members.iter().map(|&i| spans[i].clone()).collect();
            let l: Vec<u8> = members.iter().map(|&i| labels[i]).collect();
            let sc: Vec<f64> = members.iter().map(|&i| scores[i]).collect();
            segment(&doc_id, &s, &l, &sc)
        })
        .collect()
}

pub fn cmd_segment(ctx: &Context, model: &Path, inputs: &[PathBuf], out: Option<&Path>) -> CliResult<Vec<SectionTree>> {
    let model = load_trained(model)?;
    let spans = load_spans_only(inputs)?;
    let (labels, scores) = score_spans(ctx, &model, &spans)?;
    let trees = segment_spans(&spans, &labels, &scores);
    match out {
        Some(p) => {
            write_json(&trees, p)?;
            let n: usize = trees.iter().map(|t| t.sections.len()).sum();
            ctx.say(format!("{} documents, {} sections -> {}", trees.len(), n, p.display()));
        }
        None => {
            let mut w = open_output(None)?;
            serde_json::to_writer_pretty(&mut w, &trees).map_err(stage("write"))?;
            writeln!(w).map_err(stage("write"))?;
        }
    }
    Ok(trees)
}

pub fn cmd_bench(
    ctx: &Context,
    data: &Path,
    kinds: &[ClassifierKind],
    repeats: usize,
    out: Option<&Path>,
) -> CliResult<Vec<Timing>> {
    if repeats == 0 {
        return Err(usage("repeats must be positive"));
    }
    let ds = load_labeled(data, &ctx.config.tagger()?)?;
    let kinds = if kinds.is_empty() { ClassifierKind::ALL.as_slice() } else { kinds };
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let spec = ctx.config.spec_for(kind)?;
        log::info!("timing {kind}");
        rows.push(timing_benchmark(&spec, &ds, repeats).map_err(stage("bench"))?);
    }
    if let Some(p) = out {
        write_timing_csv(&rows, p).map_err(stage("write"))?;
    }
    ctx.say(format!("{:<24} {:>14} {:>14}", "classifier", "train s", "predict s"));
    for t in &rows {
        ctx.say(format!("{:<24} {:>14.6} {:>14.6}", t.name, t.train_seconds_mean, t.predict_seconds_mean));
    }
    Ok(rows)
}
