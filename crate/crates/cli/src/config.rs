//! Pipeline configuration file (TOML).
//!
//! ```toml
//! seed = 7
//! test_fraction = 0.3
//! features = ["bold", "font_flag", "words"]   # optional fixed mask
//!
//! [paths]
//! input = "labeled.csv"
//! model = "model.hdm"
//! report = "train_report.json"
//! holdout = "holdout.csv"
//! lexicon = "lexicon.tsv"
//!
//! [classifier]
//! kind = "decision_tree"
//! params = { min_samples_leaf = 3 }
//!
//! [smote]
//! enabled = true
//! k_neighbors = 5
//!
//! [rfecv]
//! enabled = false
//! folds = 10
//! repeats = 5
//!
//! [grid]
//! enabled = false
//! file = "grid.toml"
//! folds = 10
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use headingdet_core::classifiers::{ClassifierKind, ClassifierSpec, ParamValue};
use headingdet_core::features::Tagger;
use headingdet_core::selection::GridSpec;
use serde::{Deserialize, Serialize};

use crate::error::{input, usage, CliResult};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub holdout: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub kind: ClassifierKind,
    pub params: BTreeMap<String, ParamValue>,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::DecisionTree,
            params: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteSection {
    pub enabled: bool,
    pub k_neighbors: usize,
}

impl Default for SmoteSection {
    fn default() -> Self {
        Self {
            enabled: true,
            k_neighbors: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfecvSection {
    pub enabled: bool,
    pub folds: usize,
    pub repeats: usize,
}

impl Default for RfecvSection {
    fn default() -> Self {
        Self {
            enabled: false,
            folds: 10,
            repeats: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub enabled: bool,
    pub file: Option<PathBuf>,
    pub folds: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            enabled: false,
            file: None,
            folds: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub features: Option<Vec<String>>,
    pub paths: Paths,
    pub classifier: ClassifierSection,
    pub smote: SmoteSection,
    pub rfecv: RfecvSection,
    pub grid: GridSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            test_fraction: 0.3,
            features: None,
            paths: Paths::default(),
            classifier: ClassifierSection::default(),
            smote: SmoteSection::default(),
            rfecv: RfecvSection::default(),
            grid: GridSection::default(),
        }
    }
}

fn rebase(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    /// Reads `path`; relative paths inside become relative to its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input(anyhow::anyhow!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.paths.input,
            &mut cfg.paths.model,
            &mut cfg.paths.report,
            &mut cfg.paths.holdout,
            &mut cfg.paths.lexicon,
            &mut cfg.grid.file,
        ] {
            rebase(base, p);
        }
        Ok(cfg)
    }

    pub fn spec(&self) -> CliResult<ClassifierSpec> {
        self.spec_for(self.classifier.kind)
    }

    /// Spec of `kind`; config params apply only when `kind` is the
    /// configured classifier.
    pub fn spec_for(&self, kind: ClassifierKind) -> CliResult<ClassifierSpec> {
        let spec = ClassifierSpec::new(kind, self.seed);
        let spec = if kind == self.classifier.kind {
            spec.with_overrides(&self.classifier.params).map_err(usage)?
        } else {
            spec
        };
        spec.params.validate().map_err(usage)?;
        Ok(spec)
    }

    pub fn tagger(&self) -> CliResult<Tagger> {
        match &self.paths.lexicon {
            Some(p) => Tagger::from_file(p).map_err(input),
            None => Ok(Tagger::embedded().clone()),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(usage(format!("test_fraction {} is outside [0, 1)", self.test_fraction)));
        }
        if self.features.is_some() && self.rfecv.enabled {
            return Err(usage("`features` and `rfecv.enabled` cannot be combined"));
        }
        for (name, k) in [("rfecv.folds", self.rfecv.folds), ("grid.folds", self.grid.folds)] {
            if k < 2 {
                return Err(usage(format!("{name} must be at least 2")));
            }
        }
        if self.rfecv.repeats == 0 {
            return Err(usage("rfecv.repeats must be positive"));
        }
        self.spec()?;
        Ok(())
    }
}

pub fn load_grid(path: &Path) -> CliResult<GridSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(anyhow::anyhow!("{}: {e}", path.display())))?;
    let grid: GridSpec =
        toml::from_str(&text).map_err(|e| usage(format!("{}: invalid grid: {e}", path.display())))?;
    grid.combinations().map_err(usage)?;
    Ok(grid)
}
