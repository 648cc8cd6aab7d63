mod common;

use std::collections::HashMap;

use common::*;
use proptest::prelude::*;
use rumour_core::classifiers::{Algorithm, TrainConfig};
use rumour_core::dataset::{make_folds, stratified_split};
use rumour_core::eval::{
    compare_report, confusion, mean_report, metrics, parse_report_csv, report_csv, run_cv,
    run_holdout, ConfusionMatrix, MetricsReport, ReportRow, Representation, RepresentationData,
};
use rumour_core::features::Lexicons;
use rumour_core::{ClassLabel, Error, LabeledDataset, Tweet};

fn tweet(id: &str, label: ClassLabel) -> Tweet {
    Tweet {
        label: Some(label),
        ..Tweet::from_text(id, "")
    }
}

fn synthetic(points: &[([f64; 2], ClassLabel)]) -> (LabeledDataset, RepresentationData) {
    let tweets = (0..points.len()).map(|i| tweet(&format!("t{i}"), points[i].1)).collect();
    let vectors: HashMap<String, Vec<f64>> = points
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (format!("t{i}"), p.to_vec()))
        .collect();
    (
        LabeledDataset::new("synthetic", tweets).unwrap(),
        RepresentationData::from_vectors(Representation::Embedding, "synthetic", vectors).unwrap(),
    )
}

fn blobs(n: usize, seed: u64) -> (LabeledDataset, RepresentationData) {
    let (x, y) = separable_2d(n, seed);
    let pts: Vec<([f64; 2], ClassLabel)> = x.iter_rows().zip(y).map(|(r, l)| ([r[0], r[1]], l)).collect();
    synthetic(&pts)
}

#[test]
fn reference_matrices_mlp_and_knn_rows() {
    let m = metrics(&ConfusionMatrix::new(1016, 144, 125, 452)).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 0.001;
    assert!(close(m.accuracy, 0.845));
    assert!(close(m.non_rumour.precision, 0.890));
    assert!(close(m.non_rumour.recall, 0.876));
    assert!(close(m.non_rumour.f1, 0.883));
    assert!(close(m.rumour.precision, 0.758));
    assert!(close(m.rumour.recall, 0.783));
    assert!(close(m.macro_avg.precision, 0.824));

    let m = metrics(&ConfusionMatrix::new(989, 171, 108, 469)).unwrap();
    assert!(close(m.accuracy, 0.839) && close(m.non_rumour.precision, 0.902));
}

#[test]
fn confusion_orientation() {
    use ClassLabel::*;
    let truth = [NonRumour, NonRumour, Rumour, Rumour, Rumour];
    let pred = [NonRumour, Rumour, NonRumour, Rumour, Rumour];
    assert_eq!(confusion(&pred, &truth).unwrap(), ConfusionMatrix::new(1, 1, 1, 2));
    assert!(matches!(confusion(&pred[..2], &truth), Err(Error::Shape(_))));
}

#[test]
fn holdout_memorization_smoke() {
    let (ds, data) = synthetic(&[([0.0, 0.0], R), ([1.0, 1.0], NR), ([5.0, 0.0], R), ([0.0, 5.0], NR)]);
    let split = stratified_split(&ds, 1.0, 0).unwrap();
    let mut split = split;
    split.test_ids = split.train_ids.clone();
    let cfg = TrainConfig {
        k_neighbors: 1,
        ..TrainConfig::new(Algorithm::Knn)
    };
    let (report, _) = run_holdout(&ds, &data, &cfg, &split).unwrap();
    assert_eq!(report.metrics.accuracy, 1.0);
    assert_eq!(report.model_tag, "synthetic");
    assert_eq!(report.representation, Representation::Embedding);
}

#[test]
fn holdout_reports_are_reproducible() {
    let (ds, data) = blobs(120, 3);
    let split = stratified_split(&ds, 0.7, 5).unwrap();
    for algo in Algorithm::ALL {
        let cfg = TrainConfig {
            seed: 17,
            epochs: 10,
            batch_size: 16,
            hidden_sizes: (16, 8),
            ..TrainConfig::new(algo)
        };
        let (a, ma) = run_holdout(&ds, &data, &cfg, &split).unwrap();
        let (b, mb) = run_holdout(&ds, &data, &cfg, &split).unwrap();
        assert_eq!(a, b, "{algo}");
        assert_eq!(ma, mb);
        assert_eq!(a.n_train + a.n_test, 120);
        assert_eq!(a.confusion.total() as usize, a.n_test);
    }
}

#[test]
fn holdout_missing_vector_is_reported() {
    let (ds, _) = blobs(20, 1);
    let data = RepresentationData::from_vectors(
        Representation::Embedding,
        "x",
        HashMap::from([("t0".to_string(), vec![0.0, 1.0])]),
    )
    .unwrap();
    let split = stratified_split(&ds, 0.5, 0).unwrap();
    let err = run_holdout(&ds, &data, &TrainConfig::new(Algorithm::Knn), &split).unwrap_err();
    assert!(matches!(err, Error::MissingVector(_)));
}

#[test]
fn holdout_on_feature_representation() {
    let mut tweets = Vec::new();
    for i in 0..10 {
        let mut t = tweet(&i.to_string(), if i % 2 == 0 { R } else { NR });
        t.text = if i % 2 == 0 { "OMG!! is this real???".into() } else { "Police confirm the road is open".into() };
        tweets.push(t);
    }
    let ds = LabeledDataset::new("f", tweets).unwrap();
    let data = RepresentationData::from_features(&ds, &Lexicons::bundled());
    assert_eq!(data.dim, 39);
    let split = stratified_split(&ds, 0.6, 2).unwrap();
    let (report, _) = run_holdout(&ds, &data, &TrainConfig::new(Algorithm::Gnb), &split).unwrap();
    assert_eq!(report.representation, Representation::Features39);
    assert_eq!(report.model_tag, "tweet39-v1");
    assert_eq!(report.metrics.accuracy, 1.0);
}

#[test]
fn cv_four_point_example() {
    // Each fold keeps one point per class; each held-out point has a
    // same-class twin in the other fold.
    let (ds, data) = synthetic(&[([0.0, 0.0], R), ([0.0, 0.1], R), ([10.0, 10.0], NR), ([10.0, 10.1], NR)]);
    let ids: Vec<String> = ds.ids().map(String::from).collect();
    let mut seed = 0;
    let plan = loop {
        let plan = make_folds(&ids, 2, seed).unwrap();
        let f = |id: &str| plan.fold_of(id).unwrap();
        if f("t0") != f("t1") && f("t2") != f("t3") {
            break plan;
        }
        seed += 1;
    };
    let cfg = TrainConfig {
        k_neighbors: 1,
        ..TrainConfig::new(Algorithm::Knn)
    };
    let report = run_cv(&ds, &data, &cfg, &plan).unwrap();
    assert_eq!(report.per_fold.len(), 2);
    assert!(report.per_fold.iter().all(|f| f.metrics.accuracy == 1.0));
    assert_eq!(report.mean.accuracy, 1.0);
}

#[test]
fn cv_fold_missing_class_is_an_error() {
    let (ds, data) = synthetic(&[([0.0, 0.0], R), ([1.0, 1.0], NR), ([2.0, 2.0], NR)]);
    let ids: Vec<String> = ds.ids().map(String::from).collect();
    let plan = make_folds(&ids, 3, 0).unwrap();
    let err = run_cv(&ds, &data, &TrainConfig::new(Algorithm::Knn), &plan).unwrap_err();
    assert!(matches!(err, Error::Validation(ref m) if m.contains("fold")));
}

#[test]
fn cv_mean_and_determinism() {
    let (ds, data) = blobs(100, 8);
    let split = stratified_split(&ds, 0.7, 1).unwrap();
    let train: Vec<String> = split.train_ids.iter().cloned().collect();
    let plan = make_folds(&train, 5, 1).unwrap();
    let cfg = TrainConfig {
        seed: 3,
        epochs: 20,
        batch_size: 16,
        hidden_sizes: (16, 8),
        ..TrainConfig::new(Algorithm::Mlp)
    };
    let a = run_cv(&ds, &data, &cfg, &plan).unwrap();
    let b = run_cv(&ds, &data, &cfg, &plan).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.per_fold.len(), 5);
    let recomputed = mean_report(&a.per_fold.iter().map(|f| f.metrics).collect::<Vec<_>>());
    assert_eq!(a.mean, recomputed);
    let acc: f64 = a.per_fold.iter().map(|f| f.metrics.accuracy).sum::<f64>() / 5.0;
    assert_eq!(a.mean.accuracy, acc);
    assert_eq!(a.rows().len(), 6);
    let total: u64 = a.per_fold.iter().map(|f| f.confusion.total()).sum();
    assert_eq!(total as usize, train.len());
}

fn row(algorithm: &str, representation: &str, values: [f64; 10]) -> ReportRow {
    ReportRow {
        run_id: format!("{algorithm}-{representation}"),
        representation: representation.into(),
        algorithm: algorithm.into(),
        seed: 0,
        config_hash: "0".into(),
        model_tag: "m".into(),
        metrics: MetricsReport::from_values(values),
    }
}

#[test]
fn compare_reference_mlp_rows() {
    let bert = REFERENCE[10].2;
    let feats = REFERENCE[11].2;
    let table = compare_report(&[row("mlp", "embedding", bert), row("mlp", "features39", feats)]);
    let improvement = table.csv.lines().last().unwrap();
    assert!(improvement.starts_with("mlp,improvement,0.090,"), "{improvement}");
    assert!(table.text.contains("improvement"));
    assert!(table.text.lines().all(|l| !l.ends_with(' ')));
}

#[test]
fn report_csv_round_trips() {
    let rows = vec![row("knn", "embedding", [0.5; 10]), row("mlp", "features39", REFERENCE[0].2)];
    let csv = report_csv(&rows);
    assert_eq!(parse_report_csv(&csv).unwrap(), rows);
    assert!(csv.starts_with("run_id,representation,algorithm,seed,config_hash,model_tag,accuracy,"));
}

proptest! {
    #[test]
    fn metrics_are_scale_free_and_bounded(
        tp in 0u64..500, fn_ in 0u64..500, fp in 0u64..500, tn in 0u64..500, k in 1u64..50,
    ) {
        prop_assume!(tp + fn_ + fp + tn > 0);
        let m = metrics(&ConfusionMatrix::new(tp, fn_, fp, tn)).unwrap();
        let s = metrics(&ConfusionMatrix::new(k * tp, k * fn_, k * fp, k * tn)).unwrap();
        for (a, b) in m.values().iter().zip(s.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!(m.values().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(m.macro_avg.precision, (m.non_rumour.precision + m.rumour.precision) / 2.0);
        prop_assert_eq!(m.macro_avg.recall, (m.non_rumour.recall + m.rumour.recall) / 2.0);
        for c in [m.non_rumour, m.rumour, m.macro_avg] {
            if c.precision + c.recall > 0.0 {
                prop_assert!(c.f1 >= c.precision.min(c.recall) - 1e-12);
                prop_assert!(c.f1 <= c.precision.max(c.recall) + 1e-12);
            }
        }
    }
}
