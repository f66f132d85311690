use std::path::Path;

use headingdet_core::classifiers::ClassifierKind;
use headingdet_core::selection::{grid_search, rfecv, write_grid_table, write_rfecv_report, GridSpec, RfecvConfig};

use super::{feature_mask, load_labeled, write_json, Context};
use crate::config::load_grid;
use crate::error::{stage, usage, CliResult};

pub struct SelectArgs<'a> {
    pub data: &'a Path,
    pub classifier: Option<ClassifierKind>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub out: Option<&'a Path>,
    pub json: Option<&'a Path>,
}

pub fn cmd_select_features(ctx: &Context, args: &SelectArgs) -> CliResult<()> {
    let cfg = &ctx.config;
    let spec = cfg.spec_for(args.classifier.unwrap_or(cfg.classifier.kind))?;
    let ds = load_labeled(args.data, &cfg.tagger()?)?;
    let rcfg = RfecvConfig {
        k: args.folds.unwrap_or(cfg.rfecv.folds),
        n_repeats: args.repeats.unwrap_or(cfg.rfecv.repeats),
        seed: cfg.seed,
    };
    if rcfg.k < 2 || rcfg.n_repeats == 0 {
        return Err(usage("folds must be at least 2 and repeats positive"));
    }
    let report = rfecv(&spec, &ds, &rcfg).map_err(stage("rfecv"))?;
    if let Some(out) = args.out {
        write_rfecv_report(&report, out).map_err(stage("write"))?;
    }
    if let Some(json) = args.json {
        write_json(&report, json)?;
    }
    for (size, acc) in report.cv_accuracy_by_size.iter().rev() {
        ctx.say(format!("{size:>3} features  cv accuracy {acc:.4}"));
    }
    ctx.say(format!("selected ({}): {}", report.selected.len(), report.selected.join(", ")));
    Ok(())
}

pub struct GridArgs<'a> {
    pub data: &'a Path,
    pub grid: Option<&'a Path>,
    pub classifier: Option<ClassifierKind>,
    pub features: Option<Vec<String>>,
    pub folds: Option<usize>,
    pub out: Option<&'a Path>,
    pub json: Option<&'a Path>,
}

pub fn cmd_grid_search(ctx: &Context, args: &GridArgs) -> CliResult<()> {
    let cfg = &ctx.config;
    let grid_path = args.grid.or(cfg.grid.file.as_deref());
    let grid = match grid_path {
        Some(p) => load_grid(p)?,
        None => GridSpec::default_for(args.classifier.unwrap_or(cfg.classifier.kind)),
    };
    if let Some(kind) = args.classifier {
        if kind != grid.kind {
            return Err(usage(format!("--classifier {kind} does not match the grid's kind {}", grid.kind)));
        }
    }
    let base = cfg.spec_for(grid.kind)?;
    let k = args.folds.unwrap_or(cfg.grid.folds);
    if k < 2 {
        return Err(usage("folds must be at least 2"));
    }
    let ds = load_labeled(args.data, &cfg.tagger()?)?;
    let names = args.features.as_deref().or(cfg.features.as_deref());
    let mask = feature_mask(&ds, names)?;
    let result = grid_search(&grid, &base, &ds, &mask, k).map_err(stage("grid-search"))?;
    if let Some(out) = args.out {
        write_grid_table(&result, out).map_err(stage("write"))?;
    }
    if let Some(json) = args.json {
        write_json(&result, json)?;
    }
    let best: Vec<String> = result.best_params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    ctx.say(format!(
        "{} combinations; best cv accuracy {:.4} with {}",
        result.table.len(),
        result.best_cv_accuracy,
        if best.is_empty() { "defaults".to_string() } else { best.join(", ") }
    ));
    Ok(())
}
