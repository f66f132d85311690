//! Classifier suite behind one train / predict / score interface.
//!
//! Every model sees only its masked features, in canonical column order.
//! Distance- and gradient-based kinds (knn, logistic regression, neural net)
//! standardize those features with a scaler stored in the model.

mod bayes;
mod boosting;
mod forest;
mod knn;
mod logistic;
mod matrix;
mod neural;
mod params;
mod persist;
mod qda;
mod tree;

pub use bayes::GaussianNb;
pub use boosting::{deviance, Boosting, BoostingFit, RegNode, RegTree};
pub use forest::Forest;
pub use knn::Knn;
pub use logistic::{Logistic, LogisticFit};
pub use matrix::{Matrix, Scaler};
pub use neural::{NeuralFit, NeuralNet};
pub use params::{
    BoostingParams, ClassifierKind, ClassifierSpec, ForestParams, KnnParams, KnnWeights,
    LogisticParams, MaxFeatures, NaiveBayesParams, NeuralParams, ParamValue, Params, QdaParams,
    TreeParams,
};
pub use persist::{load_model, read_model, save_model, write_model, MAGIC, SCHEMA_VERSION};
pub use qda::{ClassGaussian, Qda};
pub use tree::{best_split, gini_impurity, leaf_fraction, Split, Tree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::LabeledDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    DecisionTree(Tree),
    RandomForest(Forest),
    Knn(Knn),
    GaussianNb(GaussianNb),
    Qda(Qda),
    LogisticRegression(Logistic),
    GradientBoosting(Boosting),
    NeuralNet(NeuralNet),
}

impl Payload {
    fn score(&self, x: &[f64]) -> f64 {
        match self {
            Payload::DecisionTree(m) => m.score(x),
            Payload::RandomForest(m) => m.score(x),
            Payload::Knn(m) => m.score(x),
            Payload::GaussianNb(m) => m.score(x),
            Payload::Qda(m) => m.score(x),
            Payload::LogisticRegression(m) => m.score(x),
            Payload::GradientBoosting(m) => m.score(x),
            Payload::NeuralNet(m) => m.score(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub spec: ClassifierSpec,
    /// Columns of the input vectors the model expects.
    pub columns: Vec<String>,
    /// Indices into `columns` the model actually uses, ascending.
    pub feature_mask: Vec<usize>,
    pub scaler: Option<Scaler>,
    pub payload: Payload,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.spec.kind()
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.feature_mask.iter().map(|&j| self.columns[j].as_str()).collect()
    }

    fn prepare(&self, vector: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.feature_mask.iter().map(|&j| vector[j]).collect();
        if let Some(s) = &self.scaler {
            s.transform_in_place(&mut x);
        }
        x
    }

    /// Positive-class score in [0, 1]; `vector` holds every model column.
    pub fn predict_score(&self, vector: &[f64]) -> f64 {
        self.payload.score(&self.prepare(vector))
    }

    /// 1 iff the score exceeds 0.5; an exact tie predicts 0.
    pub fn predict(&self, vector: &[f64]) -> u8 {
        (self.predict_score(vector) > 0.5) as u8
    }

    fn check_columns(&self, ds: &LabeledDataset) -> Result<()> {
        if ds.columns() != self.columns.as_slice() {
            return Err(Error::Dataset(format!(
                "model expects columns [{}] but the dataset has [{}]",
                self.columns.join(", "),
                ds.columns().join(", ")
            )));
        }
        Ok(())
    }

    /// Scores for every row, in row order.
    pub fn score_dataset(&self, ds: &LabeledDataset) -> Result<Vec<f64>> {
        self.check_columns(ds)?;
        Ok(exec::map_range(ds.n_rows(), |i| self.predict_score(ds.row(i))))
    }

    pub fn predict_dataset(&self, ds: &LabeledDataset) -> Result<Vec<u8>> {
        Ok(self.score_dataset(ds)?.into_iter().map(|s| (s > 0.5) as u8).collect())
    }
}

fn check_classes(kind: ClassifierKind, labels: &[u8]) -> Result<()> {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if kind != ClassifierKind::Knn && (pos == 0 || pos == labels.len()) {
        return Err(Error::DegenerateClasses(format!(
            "{kind} needs both classes but the training data has {pos} positive of {}",
            labels.len()
        )));
    }
    Ok(())
}

/// Trains on every column of `dataset`.
pub fn train(spec: &ClassifierSpec, dataset: &LabeledDataset) -> Result<TrainedModel> {
    let mask: Vec<usize> = (0..dataset.n_cols()).collect();
    train_masked(spec, dataset, &mask)
}

/// Trains on the columns listed in `mask` (any order; duplicates ignored).
pub fn train_masked(spec: &ClassifierSpec, dataset: &LabeledDataset, mask: &[usize]) -> Result<TrainedModel> {
    spec.params.validate()?;
    if dataset.is_empty() {
        return Err(Error::Empty("training dataset has no rows".into()));
    }
    let mut mask = mask.to_vec();
    mask.sort_unstable();
    mask.dedup();
    if mask.is_empty() {
        return Err(Error::Dataset("feature mask is empty".into()));
    }
    if let Some(&bad) = mask.iter().find(|&&j| j >= dataset.n_cols()) {
        return Err(Error::Dataset(format!(
            "feature index {bad} is out of range for {} columns",
            dataset.n_cols()
        )));
    }
    let y = dataset.labels();
    check_classes(spec.kind(), y)?;

    let raw = Matrix::from_dataset(dataset, &mask);
    let (scaler, x) = if spec.kind().uses_scaling() {
        let s = Scaler::fit(&raw);
        let x = s.transform(&raw);
        (Some(s), x)
    } else {
        (None, raw)
    };
    let seed = spec.seed;
    let payload = match &spec.params {
        Params::DecisionTree(p) => {
            let cfg = tree::GrowConfig {
                min_samples_split: p.min_samples_split,
                min_samples_leaf: p.min_samples_leaf,
                max_depth: (p.max_depth > 0).then_some(p.max_depth),
                max_features: None,
            };
            let sample: Vec<usize> = (0..x.rows).collect();
            Payload::DecisionTree(tree::grow(&x, y, &sample, &cfg, None))
        }
        Params::RandomForest(p) => Payload::RandomForest(Forest::fit(&x, y, p, seed)),
        Params::Knn(p) => Payload::Knn(Knn::fit(&x, y, p)),
        Params::GaussianNb(p) => Payload::GaussianNb(GaussianNb::fit(&x, y, p)),
        Params::Qda(p) => Payload::Qda(Qda::fit(&x, y, p)?),
        Params::LogisticRegression(p) => Payload::LogisticRegression(Logistic::fit(&x, y, p).model),
        Params::GradientBoosting(p) => Payload::GradientBoosting(Boosting::fit(&x, y, p, seed).model),
        Params::NeuralNet(p) => Payload::NeuralNet(NeuralNet::fit(&x, y, p, seed).model),
    };
    Ok(TrainedModel {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        columns: dataset.columns().to_vec(),
        feature_mask: mask,
        scaler,
        payload,
    })
}
