//! The full training pipeline: split, balance, select, tune, fit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use headingdet_core::classifiers::{save_model, train_masked, ClassifierKind, ParamValue, TrainedModel};
use headingdet_core::evaluation::{evaluate, ConfusionMatrix, MetricSet};
use headingdet_core::ingest::{write_feature_dataset, LabeledDataset};
use headingdet_core::resample::{class_counts, smote, SmoteParams};
use headingdet_core::rng::rng_at;
use headingdet_core::selection::{grid_search, rfecv, GridSpec, RfecvConfig, RfecvReport};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{feature_mask, load_labeled, write_json, Context};
use crate::config::{load_grid, PipelineConfig};
use crate::error::{input, stage, usage, CliResult};

const SPLIT_STREAM: u64 = 0x5b11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCounts {
    pub total: usize,
    pub train: usize,
    pub test: usize,
    pub train_positive: usize,
    pub test_positive: usize,
    /// Training rows after balancing, synthetic ones included.
    pub train_balanced: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub combinations: usize,
    pub best_params: BTreeMap<String, ParamValue>,
    pub best_cv_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutSummary {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
    pub auc: Option<f64>,
}

/// Outcome of every stage. Holds no timings or output paths, so repeated
/// runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub seed: u64,
    pub classifier: ClassifierKind,
    pub params: BTreeMap<String, ParamValue>,
    pub features: Vec<String>,
    pub rows: RowCounts,
    pub smote: Option<SmoteParams>,
    pub rfecv: Option<RfecvReport>,
    pub grid: Option<GridSummary>,
    pub holdout: Option<HoldoutSummary>,
}

pub struct TrainOutcome {
    pub model: TrainedModel,
    pub report: TrainReport,
    pub holdout: LabeledDataset,
}

/// Per-class seeded shuffle; `round(fraction · class size)` rows of each
/// class go to the test side. Both sides keep original row order.
pub fn stratified_split(labels: &[u8], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut is_test = vec![false; labels.len()];
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng_at(seed, &[SPLIT_STREAM, class as u64]));
        let n_test = (idx.len() as f64 * fraction).round() as usize;
        idx[..n_test].iter().for_each(|&i| is_test[i] = true);
    }
    let train = (0..labels.len()).filter(|&i| !is_test[i]).collect();
    let test = (0..labels.len()).filter(|&i| is_test[i]).collect();
    (train, test)
}

/// Checks every referenced path before any stage runs.
fn preflight(cfg: &PipelineConfig) -> CliResult<(PathBuf, Option<GridSpec>)> {
    cfg.validate()?;
    let data = cfg
        .paths
        .input
        .clone()
        .ok_or_else(|| usage("no training input: pass --input or set paths.input"))?;
    if !data.is_file() {
        return Err(input(anyhow::anyhow!("{}: no such file", data.display())));
    }
    if let Some(lex) = &cfg.paths.lexicon {
        if !lex.is_file() {
            return Err(input(anyhow::anyhow!("{}: no such lexicon file", lex.display())));
        }
    }
    for out in [&cfg.paths.model, &cfg.paths.report, &cfg.paths.holdout].into_iter().flatten() {
        let parent = out.parent().filter(|p| !p.as_os_str().is_empty());
        if parent.is_some_and(|p| !p.is_dir()) {
            return Err(usage(format!("{}: output directory does not exist", out.display())));
        }
    }
    let grid = if cfg.grid.enabled {
        let g = match &cfg.grid.file {
            Some(p) => load_grid(p)?,
            None => GridSpec::default_for(cfg.classifier.kind),
        };
        if g.kind != cfg.classifier.kind {
            return Err(usage(format!(
                "grid is for {} but classifier.kind is {}",
                g.kind, cfg.classifier.kind
            )));
        }
        Some(g)
    } else {
        None
    };
    Ok((data, grid))
}

pub fn run_pipeline(cfg: &PipelineConfig) -> CliResult<TrainOutcome> {
    let (data, grid) = preflight(cfg)?;
    let base = cfg.spec()?;
    let tagger = cfg.tagger()?;
    let ds = load_labeled(&data, &tagger)?;
    let fixed_mask = feature_mask(&ds, cfg.features.as_deref())?;

    let (train_idx, test_idx) = stratified_split(ds.labels(), cfg.test_fraction, cfg.seed);
    let train_raw = ds.subset(&train_idx);
    let holdout = ds.subset(&test_idx);
    log::info!("split {} rows into {} train / {} test", ds.n_rows(), train_raw.n_rows(), holdout.n_rows());

    let smote_params = cfg.smote.enabled.then_some(SmoteParams {
        k_neighbors: cfg.smote.k_neighbors,
        seed: cfg.seed,
    });
    let train = match &smote_params {
        Some(p) => smote(&train_raw, p).map_err(stage("smote"))?,
        None => train_raw.clone(),
    };

    let rfecv_report = if cfg.rfecv.enabled {
        log::info!("running feature elimination");
        let r = rfecv(
            &base,
            &train,
            &RfecvConfig {
                k: cfg.rfecv.folds,
                n_repeats: cfg.rfecv.repeats,
                seed: cfg.seed,
            },
        )
        .map_err(stage("rfecv"))?;
        Some(r)
    } else {
        None
    };
    let mask = match &rfecv_report {
        Some(r) => r.selected_indices(&train),
        None => fixed_mask,
    };

    let (spec, grid_summary) = match &grid {
        Some(g) => {
            log::info!("running grid search");
            let res = grid_search(g, &base, &train, &mask, cfg.grid.folds).map_err(stage("grid-search"))?;
            let spec = res.best_spec(&base).map_err(stage("grid-search"))?;
            let summary = GridSummary {
                combinations: res.table.len(),
                best_params: res.best_params.clone(),
                best_cv_accuracy: res.best_cv_accuracy,
            };
            (spec, Some(summary))
        }
        None => (base, None),
    };

    let model = train_masked(&spec, &train, &mask).map_err(stage("train"))?;
    let holdout_summary = if holdout.is_empty() {
        None
    } else {
        let r = evaluate(&model, &holdout).map_err(stage("evaluate"))?;
        Some(HoldoutSummary {
            auc: r.auc(),
            confusion: r.confusion,
            metrics: r.metrics,
        })
    };
    let positives = |d: &LabeledDataset| class_counts(d.labels()).1;
    let report = TrainReport {
        seed: cfg.seed,
        classifier: spec.kind(),
        params: spec.params.to_map(),
        features: model.feature_names().into_iter().map(String::from).collect(),
        rows: RowCounts {
            total: ds.n_rows(),
            train: train_raw.n_rows(),
            test: holdout.n_rows(),
            train_positive: positives(&train_raw),
            test_positive: positives(&holdout),
            train_balanced: train.n_rows(),
        },
        smote: smote_params,
        rfecv: rfecv_report,
        grid: grid_summary,
        holdout: holdout_summary,
    };
    Ok(TrainOutcome {
        model,
        report,
        holdout,
    })
}

pub fn cmd_train(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.config;
    let model_path: &Path = cfg
        .paths
        .model
        .as_deref()
        .ok_or_else(|| usage("no model output: pass --model or set paths.model"))?;
    let outcome = run_pipeline(cfg)?;
    save_model(&outcome.model, model_path).map_err(stage("save"))?;
    if let Some(p) = &cfg.paths.report {
        write_json(&outcome.report, p)?;
    }
    if let Some(p) = &cfg.paths.holdout {
        write_feature_dataset(&outcome.holdout, p).map_err(stage("write"))?;
    }
    let r = &outcome.report;
    ctx.say(format!(
        "trained {} on {} rows ({} after balancing) using {} features -> {}",
        r.classifier,
        r.rows.train,
        r.rows.train_balanced,
        r.features.len(),
        model_path.display()
    ));
    if let Some(h) = &r.holdout {
        ctx.say(format!(
            "held-out accuracy {:.4} on {} rows{}",
            h.metrics.accuracy,
            r.rows.test,
            h.auc.map_or(String::new(), |a| format!(", AUC {a:.4}"))
        ));
    }
    Ok(())
}
