//! Command-line pipeline around `headingdet-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod segment;

use clap::Parser;

use cli::{Cli, Command, TrainArgs};
use commands::Context;
use config::PipelineConfig;
use error::CliResult;

fn apply_train_args(cfg: &mut PipelineConfig, a: TrainArgs) {
    let paths = &mut cfg.paths;
    for (slot, v) in [
        (&mut paths.input, a.input),
        (&mut paths.model, a.model),
        (&mut paths.report, a.report),
        (&mut paths.holdout, a.holdout),
    ] {
        if v.is_some() {
            *slot = v;
        }
    }
    if let Some(kind) = a.classifier {
        if kind != cfg.classifier.kind {
            cfg.classifier.kind = kind;
            cfg.classifier.params.clear();
        }
    }
    if a.features.is_some() {
        cfg.features = a.features;
    }
    if let Some(f) = a.test_fraction {
        cfg.test_fraction = f;
    }
    if a.no_smote {
        cfg.smote.enabled = false;
    }
    if let Some(k) = a.smote_k {
        cfg.smote.k_neighbors = k;
    }
    if a.rfecv {
        cfg.rfecv.enabled = true;
    }
    if let Some(g) = a.grid {
        cfg.grid.enabled = true;
        if !g.as_os_str().is_empty() {
            cfg.grid.file = Some(g);
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let mut config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let mut ctx = Context {
        config,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Extract { inputs, out } => commands::cmd_extract(&ctx, &inputs, &out),
        Command::Featurize { data, out } => commands::cmd_featurize(&ctx, &data, &out),
        Command::Balance { data, out, k_neighbors } => commands::cmd_balance(&ctx, &data, &out, k_neighbors),
        Command::SelectFeatures {
            data,
            classifier,
            folds,
            repeats,
            out,
            json,
        } => commands::cmd_select_features(
            &ctx,
            &commands::SelectArgs {
                data: &data,
                classifier,
                folds,
                repeats,
                out: out.as_deref(),
                json: json.as_deref(),
            },
        ),
        Command::GridSearch {
            data,
            grid,
            classifier,
            features,
            folds,
            out,
            json,
        } => commands::cmd_grid_search(
            &ctx,
            &commands::GridArgs {
                data: &data,
                grid: grid.as_deref(),
                classifier,
                features,
                folds,
                out: out.as_deref(),
                json: json.as_deref(),
            },
        ),
        Command::Train(args) => {
            apply_train_args(&mut ctx.config, args);
            commands::cmd_train(&ctx)
        }
        Command::Evaluate {
            model,
            data,
            json,
            roc,
            metrics,
        } => commands::cmd_evaluate(
            &ctx,
            &commands::EvaluateArgs {
                model: &model,
                data: &data,
                json: json.as_deref(),
                roc: roc.as_deref(),
                metrics: metrics.as_deref(),
            },
        )
        .map(drop),
        Command::Predict { model, inputs, out } => commands::cmd_predict(&ctx, &model, &inputs, out.as_deref()),
        Command::Segment { model, inputs, out } => {
            commands::cmd_segment(&ctx, &model, &inputs, out.as_deref()).map(drop)
        }
        Command::Bench {
            data,
            classifiers,
            repeats,
            out,
        } => commands::cmd_bench(&ctx, &data, &classifiers, repeats, out.as_deref()).map(drop),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
