//! K-fold cross-validation, recursive feature elimination and grid search.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train_masked, ClassifierKind, ClassifierSpec, ParamValue, TrainedModel};
use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::LabeledDataset;
use crate::rng::rng_at;

const FOLD_STREAM: u64 = 0xf01d;
const PERMUTE_STREAM: u64 = 0x9e12;

/// Assignment of rows to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_rows: usize,
    pub k: usize,
    pub seed: u64,
    /// Fold index of each row.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Held-out rows of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n_rows).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n_rows).filter(|&i| self.assignments[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle, then contiguous chunks; the first `n_rows % k` folds
/// get one extra row.
pub fn kfold_split(n_rows: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::param("k", "at least 2 folds are needed"));
    }
    if n_rows < k {
        return Err(Error::TooFewRows { n_rows, k });
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut rng_at(seed, &[FOLD_STREAM]));
    let (base, extra) = (n_rows / k, n_rows % k);
    let mut assignments = vec![0; n_rows];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &row in &order[pos..pos + size] {
            assignments[row] = fold;
        }
        pos += size;
    }
    Ok(FoldPlan {
        n_rows,
        k,
        seed,
        assignments,
    })
}

fn check_plan(ds: &LabeledDataset, plan: &FoldPlan) -> Result<()> {
    if plan.n_rows != ds.n_rows() {
        return Err(Error::LengthMismatch {
            left: plan.n_rows,
            right: ds.n_rows(),
        });
    }
    Ok(())
}

/// Runs `eval(train, test)` on every fold and returns the per-fold values.
/// Fails with the fold index when a training part holds a single class.
pub fn cross_validate<F>(ds: &LabeledDataset, plan: &FoldPlan, eval: F) -> Result<Vec<f64>>
where
    F: Fn(&LabeledDataset, &LabeledDataset) -> Result<f64> + Sync + Send,
{
    check_plan(ds, plan)?;
    exec::try_map_range(plan.k, |fold| {
        let train = ds.subset(&plan.train_indices(fold));
        let pos = train.labels().iter().filter(|&&l| l == 1).count();
        if pos == 0 || pos == train.n_rows() {
            return Err(Error::DegenerateFold { fold });
        }
        let test = ds.subset(&plan.test_indices(fold));
        eval(&train, &test)
    })
}

pub fn accuracy_on(model: &TrainedModel, test: &LabeledDataset) -> f64 {
    let hits = (0..test.n_rows())
        .filter(|&i| model.predict(test.row(i)) == test.label(i))
        .count();
    hits as f64 / test.n_rows().max(1) as f64
}

pub fn cross_val_scores(
    spec: &ClassifierSpec,
    ds: &LabeledDataset,
    plan: &FoldPlan,
    mask: &[usize],
) -> Result<Vec<f64>> {
    cross_validate(ds, plan, |train, test| {
        Ok(accuracy_on(&train_masked(spec, train, mask)?, test))
    })
}

/// Unweighted mean of per-fold accuracies over every column of `ds`.
pub fn cross_val_accuracy(spec: &ClassifierSpec, ds: &LabeledDataset, plan: &FoldPlan) -> Result<f64> {
    let mask: Vec<usize> = (0..ds.n_cols()).collect();
    Ok(mean(&cross_val_scores(spec, ds, plan, &mask)?))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RfecvConfig {
    pub k: usize,
    pub n_repeats: usize,
    pub seed: u64,
}

impl Default for RfecvConfig {
    fn default() -> Self {
        Self {
            k: 10,
            n_repeats: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfecvStep {
    pub features: Vec<String>,
    pub cv_accuracy: f64,
    /// Mean permutation importance of each entry in `features`.
    pub importances: Vec<f64>,
    /// Feature removed after this step; none for the last one.
    pub eliminated: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfecvReport {
    /// First-eliminated first.
    pub elimination_order: Vec<String>,
    pub cv_accuracy_by_size: BTreeMap<usize, f64>,
    /// Best subset, in canonical column order.
    pub selected: Vec<String>,
    pub steps: Vec<RfecvStep>,
}

impl RfecvReport {
    pub fn selected_indices(&self, ds: &LabeledDataset) -> Vec<usize> {
        self.selected.iter().filter_map(|n| ds.column_index(n)).collect()
    }
}

/// Mean accuracy drop on `test` when each masked column is permuted,
/// averaged over `n_repeats` shuffles.
pub fn permutation_importance(
    model: &TrainedModel,
    test: &LabeledDataset,
    n_repeats: usize,
    seed: u64,
    path: &[u64],
) -> Vec<f64> {
    let base = accuracy_on(model, test);
    let mut rows: Vec<Vec<f64>> = test.rows().map(<[f64]>::to_vec).collect();
    model
        .feature_mask
        .iter()
        .map(|&j| {
            let original: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let mut drop = 0.0;
            for rep in 0..n_repeats {
                let mut p = [path, &[j as u64, rep as u64]].concat();
                p.insert(0, PERMUTE_STREAM);
                let mut col = original.clone();
                col.shuffle(&mut rng_at(seed, &p));
                for (r, v) in rows.iter_mut().zip(&col) {
                    r[j] = *v;
                }
                let hits = rows
                    .iter()
                    .enumerate()
                    .filter(|(i, r)| model.predict(r) == test.label(*i))
                    .count();
                drop += base - hits as f64 / rows.len().max(1) as f64;
            }
            for (r, v) in rows.iter_mut().zip(&original) {
                r[j] = *v;
            }
            drop / n_repeats.max(1) as f64
        })
        .collect()
}

/// Removes one feature per round, least important first, and keeps the
/// subset with the best cross-validated accuracy (ties go to the smaller
/// subset). Importances come from the fold models on their held-out rows.
pub fn rfecv(spec: &ClassifierSpec, ds: &LabeledDataset, cfg: &RfecvConfig) -> Result<RfecvReport> {
    if ds.n_cols() < 2 {
        return Err(Error::Dataset("feature elimination needs at least 2 features".into()));
    }
    let plan = kfold_split(ds.n_rows(), cfg.k, cfg.seed)?;
    let mut active: Vec<usize> = (0..ds.n_cols()).collect();
    let mut steps = Vec::new();
    loop {
        let per_fold = {
            let active = &active;
            let size = active.len() as u64;
            check_plan(ds, &plan)?;
            exec::try_map_range(plan.k, |fold| {
                let train = ds.subset(&plan.train_indices(fold));
                let pos = train.labels().iter().filter(|&&l| l == 1).count();
                if pos == 0 || pos == train.n_rows() {
                    return Err(Error::DegenerateFold { fold });
                }
                let test = ds.subset(&plan.test_indices(fold));
                let model = train_masked(spec, &train, active)?;
                let acc = accuracy_on(&model, &test);
                let imp = permutation_importance(&model, &test, cfg.n_repeats, cfg.seed, &[size, fold as u64]);
                Ok((acc, imp))
            })?
        };
        let cv_accuracy = mean(&per_fold.iter().map(|(a, _)| *a).collect::<Vec<_>>());
        let importances: Vec<f64> = (0..active.len())
            .map(|j| per_fold.iter().map(|(_, imp)| imp[j]).sum::<f64>() / per_fold.len() as f64)
            .collect();
        let features = active.iter().map(|&j| ds.columns()[j].clone()).collect();
        if active.len() == 1 {
            steps.push(RfecvStep {
                features,
                cv_accuracy,
                importances,
                eliminated: None,
            });
            break;
        }
        // Lowest importance; among equals the higher column index goes first.
        let mut weakest = 0;
        for j in 1..active.len() {
            if importances[j] <= importances[weakest] {
                weakest = j;
            }
        }
        let removed = active.remove(weakest);
        steps.push(RfecvStep {
            features,
            cv_accuracy,
            importances,
            eliminated: Some(ds.columns()[removed].clone()),
        });
    }

    let cv_accuracy_by_size: BTreeMap<usize, f64> =
        steps.iter().map(|s| (s.features.len(), s.cv_accuracy)).collect();
    let best = steps
        .iter()
        .rev()
        .fold(None::<&RfecvStep>, |best, s| match best {
            Some(b) if s.cv_accuracy <= b.cv_accuracy => Some(b),
            _ => Some(s),
        })
        .expect("at least one step");
    Ok(RfecvReport {
        elimination_order: steps.iter().filter_map(|s| s.eliminated.clone()).collect(),
        cv_accuracy_by_size,
        selected: best.features.clone(),
        steps,
    })
}

/// A classifier kind and the candidate values of each swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub axes: BTreeMap<String, Vec<ParamValue>>,
}

impl GridSpec {
    /// Cartesian product in axis-name order, last axis varying fastest.
    pub fn combinations(&self) -> Result<Vec<BTreeMap<String, ParamValue>>> {
        if let Some((name, _)) = self.axes.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::param(name, "grid axis has no values"));
        }
        let mut combos = vec![BTreeMap::new()];
        for (name, values) in &self.axes {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.insert(name.clone(), v.clone());
                        c
                    })
                })
                .collect();
        }
        Ok(combos)
    }

    /// Swept grid for `kind`; always contains the default parameters.
    pub fn default_for(kind: ClassifierKind) -> GridSpec {
        fn ints(v: &[i64]) -> Vec<ParamValue> {
            v.iter().map(|&x| ParamValue::Int(x)).collect()
        }
        fn floats(v: &[f64]) -> Vec<ParamValue> {
            v.iter().map(|&x| ParamValue::Float(x)).collect()
        }
        fn strs(v: &[&str]) -> Vec<ParamValue> {
            v.iter().map(|&x| ParamValue::Str(x.into())).collect()
        }
        let axes: Vec<(&str, Vec<ParamValue>)> = match kind {
            ClassifierKind::DecisionTree => vec![
                ("min_samples_split", ints(&[2, 5, 10])),
                ("min_samples_leaf", ints(&[1, 3, 5, 10])),
            ],
            ClassifierKind::RandomForest => vec![
                ("n_estimators", ints(&[2, 10, 50])),
                ("max_depth", ints(&[3, 5, 10])),
                ("min_samples_leaf", ints(&[1, 3])),
            ],
            ClassifierKind::Knn => vec![
                ("n_neighbors", ints(&[3, 5, 10, 15])),
                ("weights", strs(&["distance", "uniform"])),
            ],
            ClassifierKind::GaussianNb => vec![("prior_positive", floats(&[0.3, 0.5, 0.7]))],
            ClassifierKind::Qda => vec![("tol", floats(&[1e-5, 1e-4, 1e-3, 1e-2]))],
            ClassifierKind::LogisticRegression => {
                vec![("c", floats(&[0.1, 1.0, 10.0])), ("max_iter", ints(&[50, 100]))]
            }
            ClassifierKind::GradientBoosting => vec![
                ("learning_rate", floats(&[0.05, 0.1, 0.2])),
                ("n_estimators", ints(&[50, 150])),
                ("max_depth", ints(&[2, 3, 4])),
            ],
            ClassifierKind::NeuralNet => vec![
                ("hidden", ints(&[50, 100])),
                ("learning_rate_init", floats(&[0.001, 0.01])),
                ("max_iter", ints(&[100, 300])),
            ],
        };
        GridSpec {
            kind,
            axes: axes.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub params: BTreeMap<String, ParamValue>,
    pub cv_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub kind: ClassifierKind,
    pub best_params: BTreeMap<String, ParamValue>,
    pub best_cv_accuracy: f64,
    pub table: Vec<GridRow>,
}

impl GridResult {
    /// `base` with the winning combination applied.
    pub fn best_spec(&self, base: &ClassifierSpec) -> Result<ClassifierSpec> {
        base.clone().with_overrides(&self.best_params)
    }
}

/// Scores every combination, applied on top of `base`, on one shared fold
/// plan seeded by `base.seed`. Ties keep the first combination.
pub fn grid_search(
    grid: &GridSpec,
    base: &ClassifierSpec,
    ds: &LabeledDataset,
    mask: &[usize],
    k: usize,
) -> Result<GridResult> {
    if grid.kind != base.kind() {
        return Err(Error::param(
            "kind",
            format!("grid is for {} but the classifier is {}", grid.kind, base.kind()),
        ));
    }
    let combos = grid.combinations()?;
    let specs: Vec<ClassifierSpec> = combos
        .iter()
        .map(|c| {
            let spec = base.clone().with_overrides(c)?;
            spec.params.validate()?;
            Ok(spec)
        })
        .collect::<Result<_>>()?;
    let plan = kfold_split(ds.n_rows(), k, base.seed)?;
    let scores = exec::try_map_range(specs.len(), |i| cross_val_scores(&specs[i], ds, &plan, mask))?;
    let table: Vec<GridRow> = combos
        .into_iter()
        .zip(scores)
        .map(|(params, folds)| GridRow {
            params,
            cv_accuracy: mean(&folds),
            fold_accuracies: folds,
        })
        .collect();
    let mut best = 0;
    for (i, row) in table.iter().enumerate() {
        if row.cv_accuracy > table[best].cv_accuracy {
            best = i;
        }
    }
    Ok(GridResult {
        kind: grid.kind,
        best_params: table[best].params.clone(),
        best_cv_accuracy: table[best].cv_accuracy,
        table,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// One row per combination: the axis values, then `cv_accuracy`.
pub fn write_grid_table(result: &GridResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let axes: Vec<&String> = result.table.first().map_or(Vec::new(), |r| r.params.keys().collect());
    let mut header: Vec<&str> = axes.iter().map(|s| s.as_str()).collect();
    header.push("cv_accuracy");
    w.write_record(&header).map_err(csv_err(path))?;
    for row in &result.table {
        let mut rec: Vec<String> = axes.iter().map(|a| row.params[*a].to_string()).collect();
        rec.push(row.cv_accuracy.to_string());
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per subset size: size, accuracy, features, and the feature
/// eliminated next.
pub fn write_rfecv_report(report: &RfecvReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["n_features", "cv_accuracy", "features", "eliminated"])
        .map_err(csv_err(path))?;
    for s in &report.steps {
        w.write_record([
            s.features.len().to_string(),
            s.cv_accuracy.to_string(),
            s.features.join(";"),
            s.eliminated.clone().unwrap_or_default(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
