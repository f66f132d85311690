//! Per-kind hyperparameters. Defaults are the tuned configuration for
//! heading detection.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    DecisionTree,
    RandomForest,
    Knn,
    GaussianNb,
    Qda,
    LogisticRegression,
    GradientBoosting,
    NeuralNet,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 8] = [
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
        ClassifierKind::Knn,
        ClassifierKind::GaussianNb,
        ClassifierKind::Qda,
        ClassifierKind::LogisticRegression,
        ClassifierKind::GradientBoosting,
        ClassifierKind::NeuralNet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::Knn => "knn",
            ClassifierKind::GaussianNb => "gaussian_nb",
            ClassifierKind::Qda => "qda",
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::GradientBoosting => "gradient_boosting",
            ClassifierKind::NeuralNet => "neural_net",
        }
    }

    /// Name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "Decision Tree",
            ClassifierKind::RandomForest => "Random Forest",
            ClassifierKind::Knn => "K-Nearest Neighbors",
            ClassifierKind::GaussianNb => "Gaussian Naive Bayes",
            ClassifierKind::Qda => "Quadratic Discriminant Analysis",
            ClassifierKind::LogisticRegression => "Logistic Regression",
            ClassifierKind::GradientBoosting => "Gradient Boosting",
            ClassifierKind::NeuralNet => "Neural Net",
        }
    }

    /// Kinds that train on z-scored features.
    pub fn uses_scaling(self) -> bool {
        matches!(
            self,
            ClassifierKind::Knn | ClassifierKind::LogisticRegression | ClassifierKind::NeuralNet
        )
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::param(
                    "kind",
                    format!(
                        "unknown classifier `{s}` (expected one of {})",
                        ClassifierKind::ALL.map(|k| k.as_str()).join(", ")
                    ),
                )
            })
    }
}

/// A scalar hyperparameter value as it appears in config and grid files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

fn as_usize(name: &str, v: &ParamValue) -> Result<usize> {
    match v {
        ParamValue::Int(i) if *i >= 0 => Ok(*i as usize),
        ParamValue::Float(x) if *x >= 0.0 && x.fract() == 0.0 => Ok(*x as usize),
        _ => Err(Error::param(name, format!("expected a non-negative integer, got `{v}`"))),
    }
}

fn as_f64(name: &str, v: &ParamValue) -> Result<f64> {
    match v {
        ParamValue::Int(i) => Ok(*i as f64),
        ParamValue::Float(x) => Ok(*x),
        _ => Err(Error::param(name, format!("expected a number, got `{v}`"))),
    }
}

fn as_bool(name: &str, v: &ParamValue) -> Result<bool> {
    match v {
        ParamValue::Bool(b) => Ok(*b),
        _ => Err(Error::param(name, format!("expected true or false, got `{v}`"))),
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::param(name, "must be positive"));
    }
    Ok(())
}

fn unit_rate(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::param(name, format!("{v} is outside (0, 1]")));
    }
    Ok(())
}

fn positive_real(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(name, format!("{v} must be positive")));
    }
    Ok(())
}

fn priors_ok(p: &[f64; 2]) -> Result<()> {
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::param("priors", "both priors must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// 0 means unlimited.
    pub max_depth: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            min_samples_split: 2,
            min_samples_leaf: 3,
            max_depth: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    Sqrt,
    Log2,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().floor() as usize,
            MaxFeatures::Log2 => (n_features as f64).log2().floor() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(c) => c,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 2,
            max_depth: 5,
            min_samples_split: 2,
            min_samples_leaf: 3,
            max_features: MaxFeatures::Sqrt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeights {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub n_neighbors: usize,
    /// Minkowski exponent; 2 is Euclidean.
    pub p: f64,
    pub weights: KnnWeights,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self {
            n_neighbors: 10,
            p: 2.0,
            weights: KnnWeights::Distance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub priors: [f64; 2],
    pub var_floor: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        Self {
            priors: [0.5, 0.5],
            var_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QdaParams {
    pub priors: [f64; 2],
    pub tol: f64,
}

impl Default for QdaParams {
    fn default() -> Self {
        Self {
            priors: [0.5, 0.5],
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Inverse L2 strength.
    pub c: f64,
    pub tol: f64,
    pub fit_intercept: bool,
    pub max_iter: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 2e-4,
            fit_intercept: true,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostingParams {
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub subsample: f64,
}

impl Default for BoostingParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            n_estimators: 150,
            max_depth: 3,
            min_samples_split: 2,
            min_samples_leaf: 1,
            subsample: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuralParams {
    pub hidden: usize,
    pub learning_rate_init: f64,
    pub max_iter: usize,
    pub shuffle: bool,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// L2 penalty on weights.
    pub alpha: f64,
    /// Mini-batch size; the effective size is `min(batch_size, n)`.
    pub batch_size: usize,
    /// Training stops after `n_iter_no_change` epochs without a loss
    /// improvement of at least `tol`.
    pub tol: f64,
    pub n_iter_no_change: usize,
}

impl Default for NeuralParams {
    fn default() -> Self {
        Self {
            hidden: 100,
            learning_rate_init: 0.001,
            max_iter: 300,
            shuffle: true,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            alpha: 1e-4,
            batch_size: 200,
            tol: 1e-4,
            n_iter_no_change: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    Knn(KnnParams),
    GaussianNb(NaiveBayesParams),
    Qda(QdaParams),
    LogisticRegression(LogisticParams),
    GradientBoosting(BoostingParams),
    NeuralNet(NeuralParams),
}

impl Params {
    pub fn defaults(kind: ClassifierKind) -> Params {
        match kind {
            ClassifierKind::DecisionTree => Params::DecisionTree(TreeParams::default()),
            ClassifierKind::RandomForest => Params::RandomForest(ForestParams::default()),
            ClassifierKind::Knn => Params::Knn(KnnParams::default()),
            ClassifierKind::GaussianNb => Params::GaussianNb(NaiveBayesParams::default()),
            ClassifierKind::Qda => Params::Qda(QdaParams::default()),
            ClassifierKind::LogisticRegression => {
                Params::LogisticRegression(LogisticParams::default())
            }
            ClassifierKind::GradientBoosting => Params::GradientBoosting(BoostingParams::default()),
            ClassifierKind::NeuralNet => Params::NeuralNet(NeuralParams::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Params::DecisionTree(_) => ClassifierKind::DecisionTree,
            Params::RandomForest(_) => ClassifierKind::RandomForest,
            Params::Knn(_) => ClassifierKind::Knn,
            Params::GaussianNb(_) => ClassifierKind::GaussianNb,
            Params::Qda(_) => ClassifierKind::Qda,
            Params::LogisticRegression(_) => ClassifierKind::LogisticRegression,
            Params::GradientBoosting(_) => ClassifierKind::GradientBoosting,
            Params::NeuralNet(_) => ClassifierKind::NeuralNet,
        }
    }

    /// Sets one named parameter.
    pub fn set(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let kind = self.kind();
        let unknown = || Error::param(name, format!("not a parameter of {kind}"));
        match self {
            Params::DecisionTree(p) => match name {
                "min_samples_split" => p.min_samples_split = as_usize(name, value)?,
                "min_samples_leaf" => p.min_samples_leaf = as_usize(name, value)?,
                "max_depth" => p.max_depth = as_usize(name, value)?,
                _ => return Err(unknown()),
            },
            Params::RandomForest(p) => match name {
                "n_estimators" => p.n_estimators = as_usize(name, value)?,
                "max_depth" => p.max_depth = as_usize(name, value)?,
                "min_samples_split" => p.min_samples_split = as_usize(name, value)?,
                "min_samples_leaf" => p.min_samples_leaf = as_usize(name, value)?,
                "max_features" => {
                    p.max_features = match value {
                        ParamValue::Str(s) if s == "sqrt" || s == "auto" => MaxFeatures::Sqrt,
                        ParamValue::Str(s) if s == "log2" => MaxFeatures::Log2,
                        ParamValue::Str(s) if s == "all" => MaxFeatures::All,
                        other => MaxFeatures::Count(as_usize(name, other)?),
                    }
                }
                _ => return Err(unknown()),
            },
            Params::Knn(p) => match name {
                "n_neighbors" => p.n_neighbors = as_usize(name, value)?,
                "p" => p.p = as_f64(name, value)?,
                "weights" => {
                    p.weights = match value {
                        ParamValue::Str(s) if s == "distance" => KnnWeights::Distance,
                        ParamValue::Str(s) if s == "uniform" => KnnWeights::Uniform,
                        other => {
                            return Err(Error::param(
                                name,
                                format!("expected `distance` or `uniform`, got `{other}`"),
                            ))
                        }
                    }
                }
                _ => return Err(unknown()),
            },
            Params::GaussianNb(p) => match name {
                "prior_negative" => p.priors[0] = as_f64(name, value)?,
                "prior_positive" => p.priors[1] = as_f64(name, value)?,
                "var_floor" => p.var_floor = as_f64(name, value)?,
                _ => return Err(unknown()),
            },
            Params::Qda(p) => match name {
                "prior_negative" => p.priors[0] = as_f64(name, value)?,
                "prior_positive" => p.priors[1] = as_f64(name, value)?,
                "tol" => p.tol = as_f64(name, value)?,
                _ => return Err(unknown()),
            },
            Params::LogisticRegression(p) => match name {
                "c" | "C" => p.c = as_f64(name, value)?,
                "tol" => p.tol = as_f64(name, value)?,
                "fit_intercept" => p.fit_intercept = as_bool(name, value)?,
                "max_iter" => p.max_iter = as_usize(name, value)?,
                _ => return Err(unknown()),
            },
            Params::GradientBoosting(p) => match name {
                "learning_rate" => p.learning_rate = as_f64(name, value)?,
                "n_estimators" => p.n_estimators = as_usize(name, value)?,
                "max_depth" => p.max_depth = as_usize(name, value)?,
                "min_samples_split" => p.min_samples_split = as_usize(name, value)?,
                "min_samples_leaf" => p.min_samples_leaf = as_usize(name, value)?,
                "subsample" => p.subsample = as_f64(name, value)?,
                _ => return Err(unknown()),
            },
            Params::NeuralNet(p) => match name {
                "hidden" | "hidden_layer_size" => p.hidden = as_usize(name, value)?,
                "learning_rate_init" => p.learning_rate_init = as_f64(name, value)?,
                "max_iter" => p.max_iter = as_usize(name, value)?,
                "shuffle" => p.shuffle = as_bool(name, value)?,
                "beta1" | "beta_1" => p.beta1 = as_f64(name, value)?,
                "beta2" | "beta_2" => p.beta2 = as_f64(name, value)?,
                "epsilon" => p.epsilon = as_f64(name, value)?,
                "alpha" => p.alpha = as_f64(name, value)?,
                "batch_size" => p.batch_size = as_usize(name, value)?,
                "tol" => p.tol = as_f64(name, value)?,
                "n_iter_no_change" => p.n_iter_no_change = as_usize(name, value)?,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Params::DecisionTree(p) => {
                if p.min_samples_split < 2 {
                    return Err(Error::param("min_samples_split", "must be at least 2"));
                }
                positive("min_samples_leaf", p.min_samples_leaf)
            }
            Params::RandomForest(p) => {
                positive("n_estimators", p.n_estimators)?;
                positive("max_depth", p.max_depth)?;
                if p.min_samples_split < 2 {
                    return Err(Error::param("min_samples_split", "must be at least 2"));
                }
                positive("min_samples_leaf", p.min_samples_leaf)?;
                if let MaxFeatures::Count(c) = p.max_features {
                    positive("max_features", c)?;
                }
                Ok(())
            }
            Params::Knn(p) => {
                positive("n_neighbors", p.n_neighbors)?;
                if !(p.p >= 1.0 && p.p.is_finite()) {
                    return Err(Error::param("p", "Minkowski exponent must be at least 1"));
                }
                Ok(())
            }
            Params::GaussianNb(p) => {
                priors_ok(&p.priors)?;
                positive_real("var_floor", p.var_floor)
            }
            Params::Qda(p) => {
                priors_ok(&p.priors)?;
                positive_real("tol", p.tol)
            }
            Params::LogisticRegression(p) => {
                positive_real("c", p.c)?;
                positive_real("tol", p.tol)?;
                positive("max_iter", p.max_iter)
            }
            Params::GradientBoosting(p) => {
                unit_rate("learning_rate", p.learning_rate)?;
                unit_rate("subsample", p.subsample)?;
                positive("n_estimators", p.n_estimators)?;
                positive("max_depth", p.max_depth)?;
                if p.min_samples_split < 2 {
                    return Err(Error::param("min_samples_split", "must be at least 2"));
                }
                positive("min_samples_leaf", p.min_samples_leaf)
            }
            Params::NeuralNet(p) => {
                positive("hidden", p.hidden)?;
                unit_rate("learning_rate_init", p.learning_rate_init)?;
                positive("max_iter", p.max_iter)?;
                positive("batch_size", p.batch_size)?;
                positive("n_iter_no_change", p.n_iter_no_change)?;
                for (name, b) in [("beta1", p.beta1), ("beta2", p.beta2)] {
                    if !(0.0..1.0).contains(&b) {
                        return Err(Error::param(name, format!("{b} is outside [0, 1)")));
                    }
                }
                positive_real("epsilon", p.epsilon)?;
                positive_real("tol", p.tol)?;
                if !(p.alpha >= 0.0) {
                    return Err(Error::param("alpha", "must be non-negative"));
                }
                Ok(())
            }
        }
    }

    /// Flat name → value view, used in reports.
    pub fn to_map(&self) -> BTreeMap<String, ParamValue> {
        let value = match self {
            Params::DecisionTree(p) => serde_json::to_value(p),
            Params::RandomForest(p) => serde_json::to_value(p),
            Params::Knn(p) => serde_json::to_value(p),
            Params::GaussianNb(p) => serde_json::to_value(p),
            Params::Qda(p) => serde_json::to_value(p),
            Params::LogisticRegression(p) => serde_json::to_value(p),
            Params::GradientBoosting(p) => serde_json::to_value(p),
            Params::NeuralNet(p) => serde_json::to_value(p),
        }
        .expect("parameter records serialize");
        let mut out = BTreeMap::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let pv = match v {
                    serde_json::Value::Bool(b) => ParamValue::Bool(b),
                    serde_json::Value::Number(n) if n.is_i64() => ParamValue::Int(n.as_i64().unwrap()),
                    serde_json::Value::Number(n) if n.is_u64() => ParamValue::Int(n.as_u64().unwrap() as i64),
                    serde_json::Value::Number(n) => ParamValue::Float(n.as_f64().unwrap()),
                    serde_json::Value::String(s) => ParamValue::Str(s),
                    other => ParamValue::Str(other.to_string()),
                };
                out.insert(k, pv);
            }
        }
        out
    }
}

/// A classifier kind with its hyperparameters and random seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub params: Params,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, seed: u64) -> Self {
        Self {
            params: Params::defaults(kind),
            seed,
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        self.params.kind()
    }

    /// Returns a copy with one parameter overridden.
    pub fn with(mut self, name: &str, value: impl Into<ParamValue>) -> Result<Self> {
        self.params.set(name, &value.into())?;
        Ok(self)
    }

    pub fn with_overrides<'a>(
        mut self,
        overrides: impl IntoIterator<Item = (&'a String, &'a ParamValue)>,
    ) -> Result<Self> {
        for (name, value) in overrides {
            self.params.set(name, value)?;
        }
        Ok(self)
    }
}
