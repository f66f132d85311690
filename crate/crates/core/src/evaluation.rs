//! Confusion-matrix metrics, ROC analysis, feature correlation and timing.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ClassifierSpec, TrainedModel};
use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::LabeledDataset;

/// Counts with heading (label 1) as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.tn + self.fp
    }
}

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (1, 0) => cm.fn_ += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fp += 1,
            _ => return Err(Error::Dataset(format!("label pair ({t}, {p}) is not binary"))),
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Metrics whose denominator was zero and were reported as 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

fn ratio(num: u64, den: u64, name: &str, undefined: &mut Vec<String>) -> f64 {
    if den == 0 {
        undefined.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricSet> {
    if cm.total() == 0 {
        return Err(Error::Empty("confusion matrix has no points".into()));
    }
    let mut undefined = Vec::new();
    let sensitivity = ratio(cm.tp, cm.tp + cm.fn_, "sensitivity", &mut undefined);
    let specificity = ratio(cm.tn, cm.tn + cm.fp, "specificity", &mut undefined);
    let precision = ratio(cm.tp, cm.tp + cm.fp, "precision", &mut undefined);
    let f1 = if precision + sensitivity == 0.0 {
        undefined.push("f1".into());
        0.0
    } else {
        2.0 * precision * sensitivity / (precision + sensitivity)
    };
    for name in &undefined {
        log::warn!("{name} is undefined (0/0); reporting 0");
    }
    Ok(MetricSet {
        sensitivity,
        specificity,
        precision,
        f1,
        accuracy: (cm.tp + cm.tn) as f64 / cm.total() as f64,
        undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores at or above this value count as positive; none at the origin.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Sweeps thresholds over the distinct scores, highest first; tied scores
/// move the curve in one step. AUC is the trapezoidal area.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Dataset("scores contain NaN".into()));
    }
    let p = y_true.iter().filter(|&&l| l == 1).count() as f64;
    let n = y_true.len() as f64 - p;
    if p == 0.0 || n == 0.0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 { tp += 1.0 } else { fp += 1.0 }
            i += 1;
        }
        let prev = *points.last().unwrap();
        let pt = RocPoint {
            fpr: fp / n,
            tpr: tp / p,
            threshold: Some(s),
        };
        auc += (pt.fpr - prev.fpr) * (pt.tpr + prev.tpr) / 2.0;
        points.push(pt);
    }
    Ok(RocCurve { points, auc })
}

fn variance_free(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Product-moment correlation of `x` (named `x_name`) with `y`.
pub fn pearson(x: &[f64], y: &[f64], x_name: &str) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 || variance_free(x) {
        return Err(Error::ZeroVariance(x_name.to_string()));
    }
    if variance_free(y) {
        return Err(Error::ZeroVariance("label".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    pub feature: String,
    /// None when the column is constant.
    pub r: Option<f64>,
}

/// Correlation of every column with the label, sorted by |r| descending
/// (constant columns last, then column order).
pub fn feature_correlations(ds: &LabeledDataset) -> Result<Vec<FeatureCorrelation>> {
    let y: Vec<f64> = ds.labels().iter().map(|&l| l as f64).collect();
    let mut out = Vec::with_capacity(ds.n_cols());
    for (j, name) in ds.columns().iter().enumerate() {
        let r = match pearson(&ds.column(j), &y, name) {
            Ok(r) => Some(r),
            Err(Error::ZeroVariance(col)) if &col == name => None,
            Err(e) => return Err(e),
        };
        out.push(FeatureCorrelation {
            feature: name.clone(),
            r,
        });
    }
    out.sort_by(|a, b| match (a.r, b.r) {
        (Some(x), Some(y)) => y.abs().total_cmp(&x.abs()),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_points: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
    /// Missing when the evaluation set holds a single class.
    pub roc: Option<RocCurve>,
}

impl EvaluationReport {
    pub fn auc(&self) -> Option<f64> {
        self.roc.as_ref().map(|r| r.auc)
    }
}

pub fn evaluate(model: &TrainedModel, ds: &LabeledDataset) -> Result<EvaluationReport> {
    if ds.is_empty() {
        return Err(Error::Empty("evaluation set has no rows".into()));
    }
    let scores = model.score_dataset(ds)?;
    let pred: Vec<u8> = scores.iter().map(|&s| (s > 0.5) as u8).collect();
    let confusion = confusion_matrix(ds.labels(), &pred)?;
    let roc = match roc_curve(ds.labels(), &scores) {
        Ok(r) => Some(r),
        Err(Error::SingleClass) => {
            log::warn!("evaluation set has a single class; ROC/AUC omitted");
            None
        }
        Err(e) => return Err(e),
    };
    Ok(EvaluationReport {
        n_points: ds.n_rows(),
        confusion,
        metrics: metrics(&confusion)?,
        roc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub train_seconds: Vec<f64>,
    pub predict_seconds: Vec<f64>,
    pub train_seconds_mean: f64,
    pub predict_seconds_mean: f64,
}

impl Timing {
    pub fn from_runs(name: impl Into<String>, train_seconds: Vec<f64>, predict_seconds: Vec<f64>) -> Self {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        Timing {
            name: name.into(),
            train_seconds_mean: mean(&train_seconds),
            predict_seconds_mean: mean(&predict_seconds),
            train_seconds,
            predict_seconds,
        }
    }
}

/// Wall-clock train and batch-predict times over `repeats` runs, measured
/// on the calling thread.
pub fn timing_benchmark(spec: &ClassifierSpec, ds: &LabeledDataset, repeats: usize) -> Result<Timing> {
    if repeats == 0 {
        return Err(Error::param("repeats", "must be positive"));
    }
    exec::sequential(|| {
        let mut train_s = Vec::with_capacity(repeats);
        let mut predict_s = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let t0 = Instant::now();
            let model = train(spec, ds)?;
            train_s.push(t0.elapsed().as_secs_f64());
            let t1 = Instant::now();
            let pred = model.predict_dataset(ds)?;
            predict_s.push(t1.elapsed().as_secs_f64());
            std::hint::black_box(pred);
        }
        Ok(Timing::from_runs(spec.kind().display_name(), train_s, predict_s))
    })
}

/// The five metric cells as printed in comparison tables:
/// four three-decimal rates and accuracy as a percentage.
pub fn metric_cells(m: &MetricSet) -> [String; 5] {
    [
        format!("{:.3}", m.sensitivity),
        format!("{:.3}", m.specificity),
        format!("{:.3}", m.precision),
        format!("{:.3}", m.f1),
        format!("{:.2}%", m.accuracy * 100.0),
    ]
}

pub const METRIC_HEADER: [&str; 5] = ["Sensitivity", "Specificity", "Precision", "F1 Score", "Accuracy"];

/// Fixed-width text table of named metric rows, with an optional AUC column.
pub fn format_metrics_table(rows: &[(String, MetricSet, Option<f64>)]) -> String {
    let name_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("Classifier".len());
    let with_auc = rows.iter().any(|r| r.2.is_some());
    let mut out = format!("{:<name_w$}", "Classifier");
    for h in METRIC_HEADER {
        out.push_str(&format!("  {h:>11}"));
    }
    if with_auc {
        out.push_str(&format!("  {:>5}", "AUC"));
    }
    out.push('\n');
    for (name, m, auc) in rows {
        out.push_str(&format!("{name:<name_w$}"));
        for c in metric_cells(m) {
            out.push_str(&format!("  {c:>11}"));
        }
        if with_auc {
            let a = auc.map_or("-".to_string(), |a| format!("{a:.2}"));
            out.push_str(&format!("  {a:>5}"));
        }
        out.push('\n');
    }
    out
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(&r).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per classifier with raw (unrounded) metric values.
pub fn write_metrics_csv(rows: &[(String, MetricSet, Option<f64>)], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["classifier", "sensitivity", "specificity", "precision", "f1", "accuracy", "auc"],
        rows.iter().map(|(name, m, auc)| {
            vec![
                name.clone(),
                m.sensitivity.to_string(),
                m.specificity.to_string(),
                m.precision.to_string(),
                m.f1.to_string(),
                m.accuracy.to_string(),
                auc.map_or(String::new(), |a| a.to_string()),
            ]
        }),
    )
}

pub fn write_roc_csv(curve: &RocCurve, path: &Path) -> Result<()> {
    write_rows(
        path,
        &["fpr", "tpr", "threshold"],
        curve.points.iter().map(|p| {
            vec![
                p.fpr.to_string(),
                p.tpr.to_string(),
                p.threshold.map_or(String::new(), |t| t.to_string()),
            ]
        }),
    )
}

pub fn write_timing_csv(rows: &[Timing], path: &Path) -> Result<()> {
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    write_rows(
        path,
        &["classifier", "train_seconds_mean", "predict_seconds_mean", "train_seconds", "predict_seconds"],
        rows.iter().map(|t| {
            vec![
                t.name.clone(),
                t.train_seconds_mean.to_string(),
                t.predict_seconds_mean.to_string(),
                join(&t.train_seconds),
                join(&t.predict_seconds),
            ]
        }),
    )
}

pub fn write_correlations_csv(rows: &[FeatureCorrelation], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["feature", "pearson_r"],
        rows.iter().map(|c| vec![c.feature.clone(), c.r.map_or(String::new(), |r| r.to_string())]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierKind;
    use crate::rng::rng_at;
    use crate::synth::{separable_dataset, SynthConfig};
    use proptest::prelude::*;
    use rand::Rng as _;

    #[test]
    fn confusion_examples() {
        let cm = confusion_matrix(&[1, 1, 0], &[1, 1, 0]).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 2, fn_: 0, tn: 1, fp: 0 });
        let cm = confusion_matrix(&[1, 0, 1], &[0, 1, 0]).unwrap();
        assert_eq!((cm.tp, cm.tn), (0, 0));
        let t = [1, 1, 1, 0, 0, 0, 1, 0, 1, 0];
        let p = [1, 0, 1, 0, 1, 0, 1, 1, 0, 0];
        assert_eq!(confusion_matrix(&t, &p).unwrap(), ConfusionMatrix { tp: 3, fn_: 2, tn: 3, fp: 2 });
        assert!(confusion_matrix(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = metrics(&ConfusionMatrix { tp: 50, fn_: 10, tn: 30, fp: 10 }).unwrap();
        assert!((m.sensitivity - 50.0 / 60.0).abs() < 1e-12);
        assert_eq!(m.specificity, 0.75);
        assert!((m.precision - 50.0 / 60.0).abs() < 1e-12);
        assert!((m.f1 - 50.0 / 60.0).abs() < 1e-12);
        assert_eq!(m.accuracy, 0.8);
        let perfect = metrics(&ConfusionMatrix { tp: 4, fn_: 0, tn: 3, fp: 0 }).unwrap();
        assert_eq!([perfect.sensitivity, perfect.specificity, perfect.precision, perfect.f1, perfect.accuracy], [1.0; 5]);
        assert!(metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn constant_zero_predictor() {
        let cm = confusion_matrix(&[1, 0, 1, 0, 0], &[0; 5]).unwrap();
        let m = metrics(&cm).unwrap();
        assert_eq!((m.sensitivity, m.specificity), (0.0, 1.0));
        assert_eq!(m.precision, 0.0);
        assert!(m.undefined.contains(&"precision".to_string()));
    }

    #[test]
    fn table_cells() {
        let m = MetricSet {
            sensitivity: 0.9861,
            specificity: 0.9519,
            precision: 0.9531,
            f1: 0.9696,
            accuracy: 0.96951,
            undefined: vec![],
        };
        assert_eq!(metric_cells(&m), ["0.986", "0.952", "0.953", "0.970", "96.95%"].map(String::from));
        let t = format_metrics_table(&[("Decision Tree".into(), m, Some(0.98))]);
        assert!(t.lines().nth(1).unwrap().starts_with("Decision Tree"));
        assert!(t.contains("96.95%") && t.contains("0.98"));
    }

    #[test]
    fn roc_examples() {
        let r = roc_curve(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap();
        assert_eq!(r.auc, 1.0);
        let r = roc_curve(&[0, 1, 0, 1], &[0.5; 4]).unwrap();
        let pts: Vec<(f64, f64)> = r.points.iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(pts, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(r.auc, 0.5);
        assert!(matches!(roc_curve(&[1, 1], &[0.2, 0.3]), Err(Error::SingleClass)));
    }

    fn mann_whitney(y: &[u8], s: &[f64]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] == 1 && y[j] == 0 {
                    pairs += 1.0;
                    if s[i] > s[j] {
                        wins += 1.0;
                    } else if s[i] == s[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    proptest! {
        #[test]
        fn auc_matches_pairwise_ranking(data in prop::collection::vec((0u8..2, 0u8..20), 2..200)) {
            let y: Vec<u8> = data.iter().map(|d| d.0).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let s: Vec<f64> = data.iter().map(|d| d.1 as f64 / 20.0).collect();
            let r = roc_curve(&y, &s).unwrap();
            prop_assert!((r.auc - mann_whitney(&y, &s)).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&r.auc));
            let neg: Vec<f64> = s.iter().map(|v| -v).collect();
            prop_assert!((roc_curve(&y, &neg).unwrap().auc - (1.0 - r.auc)).abs() < 1e-9);
            let first = r.points[0];
            let last = *r.points.last().unwrap();
            prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
            prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
            for w in r.points.windows(2) {
                prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            }
        }

        #[test]
        fn metric_identities(tp in 0u64..500, fn_ in 0u64..500, tn in 0u64..500, fp in 0u64..500) {
            let cm = ConfusionMatrix { tp, fn_, tn, fp };
            prop_assume!(cm.total() > 0);
            let m = metrics(&cm).unwrap();
            prop_assert_eq!(m.accuracy, (tp + tn) as f64 / (tp + tn + fp + fn_) as f64);
            if tp + fn_ > 0 { prop_assert_eq!(m.sensitivity, tp as f64 / (tp + fn_) as f64); }
            if tn + fp > 0 { prop_assert_eq!(m.specificity, tn as f64 / (tn + fp) as f64); }
            if tp + fp > 0 && tp + fn_ > 0 && m.precision + m.sensitivity > 0.0 {
                prop_assert_eq!(m.f1, 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity));
            }
        }

        #[test]
        fn pearson_is_affine_invariant(
            x in prop::collection::vec(-50i32..50, 3..60),
            a in prop::sample::select(vec![-3.0, -0.5, 0.25, 2.0, 7.0]),
            b in -10.0f64..10.0,
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| ((v + i as f64) > 0.0) as u8 as f64).collect();
            prop_assume!(!variance_free(&x) && !variance_free(&y));
            let r = pearson(&x, &y, "x").unwrap();
            let t: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let rt = pearson(&t, &y, "x").unwrap();
            prop_assert!((rt - a.signum() * r).abs() < 1e-9);
        }
    }

    #[test]
    fn pearson_examples() {
        let y = [0.0, 1.0, 0.0, 1.0, 1.0];
        assert!((pearson(&y, &y, "bold").unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert!((pearson(&neg, &y, "bold").unwrap() + 1.0).abs() < 1e-12);
        match pearson(&[2.0; 5], &y, "font_flag") {
            Err(Error::ZeroVariance(c)) => assert_eq!(c, "font_flag"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn correlations_rank_bold_first_on_synthetic_data() {
        let ds = separable_dataset(&SynthConfig { n_rows: 200, positive_fraction: 0.3, noise: 0.0, seed: 1 });
        let c = feature_correlations(&ds).unwrap();
        assert_eq!(c[0].feature, "bold");
        assert!((c[0].r.unwrap() - 1.0).abs() < 1e-12);
        assert!(c.iter().any(|f| f.r.is_none()));
    }

    #[test]
    fn timing_means_are_means() {
        let ds = separable_dataset(&SynthConfig { n_rows: 60, ..SynthConfig::default() });
        let spec = ClassifierSpec::new(ClassifierKind::DecisionTree, 0);
        let t = timing_benchmark(&spec, &ds, 1).unwrap();
        assert_eq!(t.train_seconds_mean, t.train_seconds[0]);
        let t = timing_benchmark(&spec, &ds, 3).unwrap();
        assert_eq!(t.train_seconds.len(), 3);
        assert_eq!(t.predict_seconds_mean, t.predict_seconds.iter().sum::<f64>() / 3.0);
    }

    #[test]
    fn evaluate_own_training_data() {
        let ds = separable_dataset(&SynthConfig { n_rows: 150, positive_fraction: 0.3, noise: 0.0, seed: 4 });
        let m = train(&ClassifierSpec::new(ClassifierKind::DecisionTree, 0), &ds).unwrap();
        let r = evaluate(&m, &ds).unwrap();
        assert_eq!(r.metrics.accuracy, 1.0);
        assert_eq!(r.auc(), Some(1.0));
        assert!(evaluate(&m, &ds.subset(&[])).is_err());
    }

    #[test]
    fn csv_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = rng_at(0, &[]);
        let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let s: Vec<f64> = (0..20).map(|_| rng.random()).collect();
        let r = roc_curve(&y, &s).unwrap();
        let p = dir.path().join("roc.csv");
        write_roc_csv(&r, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("fpr,tpr,threshold\n0,0,\n"));
        assert_eq!(text.lines().count(), r.points.len() + 1);
    }
}
