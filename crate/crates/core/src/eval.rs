//! Confusion matrices, accuracy / precision / recall / F1, the hold-out and
//! k-fold protocols, and comparison tables.
//!
//! Orientation: non-rumour is the positive class. `tp` counts non-rumours
//! predicted non-rumour, `fn_` non-rumours predicted rumour, `fp` rumours
//! predicted non-rumour and `tn` rumours predicted rumour. Rumour-class
//! metrics swap the roles. The "all class" figures are the macro averages
//! of precision and recall, and the F1 of that macro precision and recall.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifiers::{fit, predict, Algorithm, Matrix, TrainConfig, TrainedModel};
use crate::dataset::{ClassLabel, FoldPlan, LabeledDataset, SplitResult};
use crate::embedding::EmbeddingStore;
use crate::features::{extract_all, Lexicons, SCHEMA_ID};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

pub fn confusion(predictions: &[ClassLabel], truth: &[ClassLabel]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Validation("confusion matrix of zero examples".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (p, t) in predictions.iter().zip(truth) {
        match (t, p) {
            (ClassLabel::NonRumour, ClassLabel::NonRumour) => cm.tp += 1,
            (ClassLabel::NonRumour, ClassLabel::Rumour) => cm.fn_ += 1,
            (ClassLabel::Rumour, ClassLabel::NonRumour) => cm.fp += 1,
            (ClassLabel::Rumour, ClassLabel::Rumour) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub non_rumour: ClassMetrics,
    pub rumour: ClassMetrics,
    #[serde(rename = "macro")]
    pub macro_avg: ClassMetrics,
    /// Set when some ratio had a zero denominator and was reported as 0.
    pub degenerate: bool,
}

/// Metric column names, in the order of [`MetricsReport::values`].
pub const METRIC_COLUMNS: [&str; 10] = [
    "accuracy",
    "macro_precision",
    "macro_recall",
    "macro_f1",
    "nr_precision",
    "nr_recall",
    "nr_f1",
    "r_precision",
    "r_recall",
    "r_f1",
];

impl MetricsReport {
    /// Accuracy, macro P/R/F1, non-rumour P/R/F1, rumour P/R/F1.
    pub fn values(&self) -> [f64; 10] {
        let (m, n, r) = (self.macro_avg, self.non_rumour, self.rumour);
        [
            self.accuracy,
            m.precision,
            m.recall,
            m.f1,
            n.precision,
            n.recall,
            n.f1,
            r.precision,
            r.recall,
            r.f1,
        ]
    }

    pub fn from_values(v: [f64; 10]) -> Self {
        let cm = |a: f64, b: f64, c: f64| ClassMetrics {
            precision: a,
            recall: b,
            f1: c,
        };
        MetricsReport {
            accuracy: v[0],
            macro_avg: cm(v[1], v[2], v[3]),
            non_rumour: cm(v[4], v[5], v[6]),
            rumour: cm(v[7], v[8], v[9]),
            degenerate: false,
        }
    }
}

fn ratio(num: f64, den: f64, degenerate: &mut bool) -> f64 {
    if den == 0.0 {
        *degenerate = true;
        0.0
    } else {
        num / den
    }
}

fn harmonic(p: f64, r: f64, degenerate: &mut bool) -> f64 {
    ratio(2.0 * p * r, p + r, degenerate)
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    if cm.total() == 0 {
        return Err(Error::Validation("empty confusion matrix".into()));
    }
    let (tp, fn_, fp, tn) = (cm.tp as f64, cm.fn_ as f64, cm.fp as f64, cm.tn as f64);
    let mut degenerate = false;
    let d = &mut degenerate;

    let accuracy = (tp + tn) / (tp + tn + fp + fn_);
    let nr_p = ratio(tp, tp + fp, d);
    let nr_r = ratio(tp, tp + fn_, d);
    let nr_f1 = harmonic(nr_p, nr_r, d);
    let r_p = ratio(tn, tn + fn_, d);
    let r_r = ratio(tn, tn + fp, d);
    let r_f1 = harmonic(r_p, r_r, d);
    let m_p = (nr_p + r_p) / 2.0;
    let m_r = (nr_r + r_r) / 2.0;
    let m_f1 = harmonic(m_p, m_r, d);

    Ok(MetricsReport {
        accuracy,
        non_rumour: ClassMetrics {
            precision: nr_p,
            recall: nr_r,
            f1: nr_f1,
        },
        rumour: ClassMetrics {
            precision: r_p,
            recall: r_r,
            f1: r_f1,
        },
        macro_avg: ClassMetrics {
            precision: m_p,
            recall: m_r,
            f1: m_f1,
        },
        degenerate,
    })
}

/// Field-wise arithmetic mean.
pub fn mean_report(reports: &[MetricsReport]) -> MetricsReport {
    let n = reports.len().max(1) as f64;
    let mut sum = [0.0; 10];
    for r in reports {
        for (s, v) in sum.iter_mut().zip(r.values()) {
            *s += v;
        }
    }
    let mut mean = MetricsReport::from_values(sum.map(|s| s / n));
    mean.degenerate = reports.iter().any(|r| r.degenerate);
    mean
}

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Features39,
    Embedding,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Features39 => "features39",
            Representation::Embedding => "embedding",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "features39" => Ok(Representation::Features39),
            "embedding" => Ok(Representation::Embedding),
            _ => Err(Error::Config(format!("unknown representation {s:?}"))),
        }
    }
}

/// Input vectors for every tweet under one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationData {
    pub kind: Representation,
    /// Feature schema id or embedding model tag.
    pub tag: String,
    pub dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl RepresentationData {
    pub fn from_features(dataset: &LabeledDataset, lexicons: &Lexicons) -> Self {
        let vectors = dataset
            .tweets()
            .iter()
            .map(|t| (t.id.clone(), extract_all(t, lexicons).as_f64()))
            .collect();
        RepresentationData {
            kind: Representation::Features39,
            tag: SCHEMA_ID.to_string(),
            dim: crate::features::N_FEATURES,
            vectors,
        }
    }

    pub fn from_store(store: &EmbeddingStore) -> Self {
        let vectors = store
            .iter()
            .map(|(id, v)| (id.to_string(), v.iter().map(|&x| f64::from(x)).collect()))
            .collect();
        RepresentationData {
            kind: Representation::Embedding,
            tag: store.model_tag().to_string(),
            dim: store.dim(),
            vectors,
        }
    }

    /// Build from explicit vectors, mostly for tests and synthetic data.
    pub fn from_vectors(
        kind: Representation,
        tag: impl Into<String>,
        vectors: HashMap<String, Vec<f64>>,
    ) -> Result<Self> {
        let dim = vectors.values().next().map_or(0, Vec::len);
        if vectors.values().any(|v| v.len() != dim) {
            return Err(Error::Shape("vectors of unequal length".into()));
        }
        Ok(RepresentationData {
            kind,
            tag: tag.into(),
            dim,
            vectors,
        })
    }

    pub fn matrix<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<Matrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for id in ids {
            let v = self
                .vectors
                .get(id)
                .ok_or_else(|| Error::MissingVector(id.to_string()))?;
            data.extend_from_slice(v);
            rows += 1;
        }
        Matrix::new(rows, self.dim, data)
    }
}

/// First 16 hex digits of the SHA-256 of the config's JSON form.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("configs serialize");
    Sha256::digest(&json)
        .iter()
        .take(8)
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub run_id: String,
    pub representation: Representation,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_hash: String,
    pub model_tag: String,
    pub config: TrainConfig,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

fn rows_and_labels<'a>(
    dataset: &'a LabeledDataset,
    keep: impl Fn(&str) -> bool,
) -> (Vec<&'a str>, Vec<ClassLabel>) {
    dataset
        .tweets()
        .iter()
        .filter(|t| keep(&t.id))
        .map(|t| (t.id.as_str(), dataset.label_of(t)))
        .unzip()
}

/// Fit on the training ids and score the test ids; rows keep dataset order.
pub fn run_holdout(
    dataset: &LabeledDataset,
    data: &RepresentationData,
    config: &TrainConfig,
    split: &SplitResult,
) -> Result<(HoldoutReport, TrainedModel)> {
    let (train_ids, train_y) = rows_and_labels(dataset, |id| split.train_ids.contains(id));
    let (test_ids, test_y) = rows_and_labels(dataset, |id| split.test_ids.contains(id));
    if test_ids.is_empty() {
        return Err(Error::Validation("hold-out split has an empty test set".into()));
    }
    let model = fit(&data.matrix(train_ids.iter().copied())?, &train_y, config)?;
    let pred = predict(&model, &data.matrix(test_ids.iter().copied())?)?;
    let cm = confusion(&pred.labels, &test_y)?;
    let report = HoldoutReport {
        run_id: format!("{}-{}", config.algorithm, data.kind.as_str()),
        representation: data.kind,
        algorithm: config.algorithm,
        seed: config.seed,
        config_hash: config_hash(config),
        model_tag: data.tag.clone(),
        config: config.clone(),
        n_train: train_ids.len(),
        n_test: test_ids.len(),
        confusion: cm,
        metrics: metrics(&cm)?,
    };
    Ok((report, model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub run_id: String,
    pub representation: Representation,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_hash: String,
    pub model_tag: String,
    pub config: TrainConfig,
    pub k: usize,
    pub per_fold: Vec<FoldReport>,
    pub mean: MetricsReport,
}

/// k-fold cross-validation over the ids in `plan`. Fold `i` is scored by a
/// model trained on the other folds with seed `config.seed + i`.
pub fn run_cv(
    dataset: &LabeledDataset,
    data: &RepresentationData,
    config: &TrainConfig,
    plan: &FoldPlan,
) -> Result<CvReport> {
    let mut per_fold = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let (train_ids, train_y) =
            rows_and_labels(dataset, |id| plan.fold_of(id).is_some_and(|f| f != fold));
        let (val_ids, val_y) = rows_and_labels(dataset, |id| plan.fold_of(id) == Some(fold));
        for class in ClassLabel::ALL {
            if !train_y.contains(&class) {
                return Err(Error::Validation(format!(
                    "fold {}: training portion has no {class} examples",
                    fold + 1
                )));
            }
        }
        if val_ids.is_empty() {
            return Err(Error::Validation(format!("fold {} is empty", fold + 1)));
        }
        let fold_config = TrainConfig {
            seed: config.seed.wrapping_add(fold as u64),
            ..config.clone()
        };
        let model = fit(&data.matrix(train_ids.iter().copied())?, &train_y, &fold_config)?;
        let pred = predict(&model, &data.matrix(val_ids.iter().copied())?)?;
        let cm = confusion(&pred.labels, &val_y)?;
        per_fold.push(FoldReport {
            fold,
            confusion: cm,
            metrics: metrics(&cm)?,
        });
    }
    let mean = mean_report(&per_fold.iter().map(|f| f.metrics).collect::<Vec<_>>());
    Ok(CvReport {
        run_id: format!("cv-{}-{}", config.algorithm, data.kind.as_str()),
        representation: data.kind,
        algorithm: config.algorithm,
        seed: config.seed,
        config_hash: config_hash(config),
        model_tag: data.tag.clone(),
        config: config.clone(),
        k: plan.k,
        per_fold,
        mean,
    })
}

// ---------------------------------------------------------------------------
// Report files and comparison tables
// ---------------------------------------------------------------------------

/// One row of `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub run_id: String,
    pub representation: String,
    pub algorithm: String,
    pub seed: u64,
    pub config_hash: String,
    pub model_tag: String,
    pub metrics: MetricsReport,
}

impl From<&HoldoutReport> for ReportRow {
    fn from(r: &HoldoutReport) -> Self {
        ReportRow {
            run_id: r.run_id.clone(),
            representation: r.representation.as_str().into(),
            algorithm: r.algorithm.as_str().into(),
            seed: r.seed,
            config_hash: r.config_hash.clone(),
            model_tag: r.model_tag.clone(),
            metrics: r.metrics,
        }
    }
}

impl CvReport {
    /// One row per fold followed by the mean row.
    pub fn rows(&self) -> Vec<ReportRow> {
        let row = |suffix: String, m: MetricsReport| ReportRow {
            run_id: format!("{}-{suffix}", self.run_id),
            representation: self.representation.as_str().into(),
            algorithm: self.algorithm.as_str().into(),
            seed: self.seed,
            config_hash: self.config_hash.clone(),
            model_tag: self.model_tag.clone(),
            metrics: m,
        };
        let mut rows: Vec<ReportRow> = self
            .per_fold
            .iter()
            .map(|f| row(format!("fold{}", f.fold + 1), f.metrics))
            .collect();
        rows.push(row("mean".into(), self.mean));
        rows
    }
}

pub fn report_csv_header() -> String {
    let mut cols = vec![
        "run_id",
        "representation",
        "algorithm",
        "seed",
        "config_hash",
        "model_tag",
    ];
    cols.extend(METRIC_COLUMNS);
    cols.join(",")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = report_csv_header();
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&r.run_id),
            csv_field(&r.representation),
            csv_field(&r.algorithm),
            r.seed,
            csv_field(&r.config_hash),
            csv_field(&r.model_tag)
        );
        for v in r.metrics.values() {
            let _ = write!(out, ",{v:.6}");
        }
        out.push('\n');
    }
    out
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            (c, _) => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

pub fn parse_report_csv(content: &str) -> Result<Vec<ReportRow>> {
    let bad = |m: String| Error::parse("<report csv>", m);
    let mut lines = content.lines();
    if lines.next() != Some(report_csv_header().as_str()) {
        return Err(bad("unexpected header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let f = split_csv_line(line);
            if f.len() != 16 {
                return Err(bad(format!("row {} has {} fields", i + 1, f.len())));
            }
            let mut values = [0.0; 10];
            for (v, s) in values.iter_mut().zip(&f[6..]) {
                *v = s.parse().map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
            }
            Ok(ReportRow {
                run_id: f[0].clone(),
                representation: f[1].clone(),
                algorithm: f[2].clone(),
                seed: f[3].parse().map_err(|e| bad(format!("row {}: {e}", i + 1)))?,
                config_hash: f[4].clone(),
                model_tag: f[5].clone(),
                metrics: MetricsReport::from_values(values),
            })
        })
        .collect()
}

/// A comparison of labeled reports, rendered as CSV and as an aligned table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub csv: String,
    pub text: String,
}

/// Tabulate reports and, for every algorithm that has both an `embedding`
/// and a `features39` row, add an improvement row (embedding minus
/// features39).
pub fn compare_report(rows: &[ReportRow]) -> ComparisonTable {
    let mut table: Vec<(String, String, [f64; 10])> = rows
        .iter()
        .map(|r| (r.algorithm.clone(), r.representation.clone(), r.metrics.values()))
        .collect();

    let mut deltas = Vec::new();
    let mut algorithms: Vec<&str> = Vec::new();
    for r in rows {
        if !algorithms.contains(&r.algorithm.as_str()) {
            algorithms.push(&r.algorithm);
        }
    }
    for alg in algorithms {
        let find = |rep: &str| {
            rows.iter()
                .find(|r| r.algorithm == alg && r.representation == rep)
                .map(|r| r.metrics.values())
        };
        if let (Some(e), Some(f)) = (find("embedding"), find("features39")) {
            let mut d = [0.0; 10];
            for i in 0..10 {
                d[i] = e[i] - f[i];
            }
            deltas.push((alg.to_string(), "improvement".to_string(), d));
        }
    }

    let mut csv = String::from("algorithm,representation,");
    csv.push_str(&METRIC_COLUMNS.join(","));
    csv.push('\n');
    for (alg, rep, v) in table.iter().chain(&deltas) {
        let _ = write!(csv, "{},{}", csv_field(alg), csv_field(rep));
        for x in v {
            let _ = write!(csv, ",{}", fmt3(*x));
        }
        csv.push('\n');
    }

    let headers = ["algorithm", "representation"]
        .into_iter()
        .chain(METRIC_COLUMNS)
        .collect::<Vec<_>>();
    table.extend(deltas.iter().cloned());
    let body: Vec<Vec<String>> = table
        .iter()
        .map(|(a, r, v)| {
            let mut cells = vec![a.clone(), r.clone()];
            cells.extend(v.iter().map(|x| fmt3(*x)));
            cells
        })
        .collect();
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| {
            body.iter()
                .map(|row| row[c].len())
                .chain([headers[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut text = String::new();
    let render = |cells: &[String], text: &mut String| {
        let line: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c < 2 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        text.push_str(line.join("  ").trim_end());
        text.push('\n');
    };
    render(&headers.iter().map(|s| s.to_string()).collect::<Vec<_>>(), &mut text);
    let rule: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    text.push_str(&"-".repeat(rule));
    text.push('\n');
    for (i, row) in body.iter().enumerate() {
        if i == rows.len() && !deltas.is_empty() {
            text.push_str(&"-".repeat(rule));
            text.push('\n');
        }
        render(row, &mut text);
    }
    ComparisonTable { csv, text }
}

/// Three decimals, without a negative sign on zero.
fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn perfect_predictions() {
        let truth = [vec![NonRumour; 5], vec![Rumour; 5]].concat();
        let cm = confusion(&truth, &truth).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(5, 0, 0, 5));
    }

    #[test]
    fn constant_predictor() {
        let truth = [NonRumour, NonRumour, NonRumour, Rumour, Rumour];
        let cm = confusion(&[NonRumour; 5], &truth).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(3, 0, 2, 0));
        let m = metrics(&cm).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.rumour.precision, 0.0);
        assert_eq!(m.rumour.f1, 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(confusion(&[Rumour], &[Rumour, Rumour]).is_err());
        assert!(confusion(&[], &[]).is_err());
        assert!(metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn perfect_metrics() {
        let m = metrics(&ConfusionMatrix::new(1, 0, 0, 1)).unwrap();
        assert!(m.values().iter().all(|&v| v == 1.0));
        assert!(!m.degenerate);
    }

    #[test]
    fn mlp_row_of_the_reference_table() {
        let m = metrics(&ConfusionMatrix::new(1016, 144, 125, 452)).unwrap();
        let expect = [0.845, 0.824, 0.830, 0.827, 0.890, 0.876, 0.883, 0.758, 0.783, 0.771];
        for (got, want) in m.values().iter().zip(expect) {
            assert!((got - want).abs() <= 0.001, "{got} vs {want}");
        }
    }

    #[test]
    fn knn_row_of_the_reference_table() {
        let m = metrics(&ConfusionMatrix::new(989, 171, 108, 469)).unwrap();
        assert!((m.accuracy - 0.839).abs() <= 0.001);
        assert!((m.non_rumour.precision - 0.902).abs() <= 0.001);
    }

    #[test]
    fn identical_reports_have_zero_deltas() {
        let m = MetricsReport::from_values([0.5; 10]);
        let row = |rep: &str| ReportRow {
            run_id: rep.into(),
            representation: rep.into(),
            algorithm: "mlp".into(),
            seed: 1,
            config_hash: "h".into(),
            model_tag: "t".into(),
            metrics: m,
        };
        let t = compare_report(&[row("embedding"), row("features39")]);
        let last = t.csv.lines().last().unwrap();
        assert_eq!(last, format!("mlp,improvement{}", ",0.000".repeat(10)));
        let single = compare_report(&[row("embedding")]);
        assert!(!single.csv.contains("improvement"));
        assert_eq!(single.csv.lines().count(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![ReportRow {
            run_id: "a,b".into(),
            representation: "embedding".into(),
            algorithm: "knn".into(),
            seed: 7,
            config_hash: "abc".into(),
            model_tag: "m \"x\"".into(),
            metrics: MetricsReport::from_values([0.25; 10]),
        }];
        let parsed = parse_report_csv(&report_csv(&rows)).unwrap();
        assert_eq!(parsed, rows);
    }
}
