use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use headingdet_core::classifiers::ClassifierKind;

#[derive(Debug, Parser)]
#[command(name = "headingdet", version, about = "Train and apply heading detectors for PDF-derived HTML")]
pub struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Pipeline config file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pull styled spans out of converter HTML into a text-mode CSV.
    Extract {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Turn a labeled text-mode CSV into a feature-mode CSV.
    Featurize {
        data: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Oversample the minority class with SMOTE.
    Balance {
        data: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, alias = "smote-k")]
        k_neighbors: Option<usize>,
    },
    /// Recursive feature elimination with cross-validation.
    SelectFeatures {
        data: PathBuf,
        #[arg(long)]
        classifier: Option<ClassifierKind>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Per-size accuracy table (CSV).
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Cross-validated hyperparameter sweep.
    GridSearch {
        data: PathBuf,
        /// Grid file (TOML); the built-in grid for the classifier otherwise.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        classifier: Option<ClassifierKind>,
        #[arg(long, value_delimiter = ',')]
        features: Option<Vec<String>>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the training pipeline and write a model file.
    Train(TrainArgs),
    /// Score a model against labeled data.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        data: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        roc: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Label every span of HTML files or a text-mode CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Split documents into heading-rooted sections (JSON).
    Segment {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Time training and prediction per classifier.
    Bench {
        data: PathBuf,
        /// Comma-separated kinds; all of them by default.
        #[arg(long, value_delimiter = ',')]
        classifiers: Vec<ClassifierKind>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Flags here override the config file.
#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled text- or feature-mode CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Training report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Held-out split (feature-mode CSV).
    #[arg(long)]
    pub holdout: Option<PathBuf>,
    #[arg(long)]
    pub classifier: Option<ClassifierKind>,
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub no_smote: bool,
    #[arg(long)]
    pub smote_k: Option<usize>,
    #[arg(long)]
    pub rfecv: bool,
    /// Enable grid search, optionally from a grid file.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    pub grid: Option<PathBuf>,
}
