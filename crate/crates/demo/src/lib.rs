//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain values and returns a JSON string, so the page
//! needs no generated TypeScript types. The `*_json` functions hold the logic
//! and are what the native tests exercise.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumour_core::classifiers::{fit, predict, Algorithm, Matrix, TrainConfig};
use rumour_core::dataset::{ClassLabel, Tweet};
use rumour_core::eval::{metrics, ConfusionMatrix};
use rumour_core::features::{extract_all, Lexicons, FEATURE_NAMES};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct FeatureEntry {
    index: usize,
    name: &'static str,
    value: i64,
}

/// The 39 features of a tweet, using the bundled lexicons.
pub fn features_json(
    text: &str,
    followers: u64,
    friends: u64,
    verified: bool,
    is_retweet: bool,
) -> Result<String, String> {
    let mut tweet = Tweet::from_text("demo", text);
    tweet.user.followers_count = followers;
    tweet.user.friends_count = friends;
    tweet.user.verified = verified;
    tweet.is_retweet = is_retweet;
    let fv = extract_all(&tweet, &Lexicons::bundled());
    let entries: Vec<FeatureEntry> = fv
        .values
        .iter()
        .enumerate()
        .map(|(index, &value)| FeatureEntry {
            index,
            name: FEATURE_NAMES[index],
            value,
        })
        .collect();
    serde_json::to_string(&entries).map_err(|e| e.to_string())
}

/// Accuracy and per-class scores with non-rumour as the positive class.
pub fn metrics_json(tp: u64, fn_: u64, fp: u64, tn: u64) -> Result<String, String> {
    let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
    if cm.total() == 0 {
        return Err("confusion matrix is empty".into());
    }
    let report = metrics(&cm).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Two-dimensional toy problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Moons,
    Blobs,
    Xor,
}

impl Shape {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "moons" => Ok(Shape::Moons),
            "blobs" => Ok(Shape::Blobs),
            "xor" => Ok(Shape::Xor),
            _ => Err(format!("unknown shape {s:?}")),
        }
    }
}

/// `n` labelled points in roughly `[-1.5, 2.5] x [-1, 1.5]`, alternating
/// between the classes.
pub fn toy_data(shape: Shape, n: usize, noise: f64, seed: u64) -> (Vec<[f64; 2]>, Vec<ClassLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 0;
        let [x, y] = match shape {
            Shape::Moons => {
                let t = rng.random_range(0.0..std::f64::consts::PI);
                if positive {
                    [t.cos(), t.sin()]
                } else {
                    [1.0 - t.cos(), 0.5 - t.sin()]
                }
            }
            Shape::Blobs => {
                if positive {
                    [0.0, 0.8]
                } else {
                    [1.0, -0.2]
                }
            }
            Shape::Xor => {
                let a = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let b = if positive { a } else { -a };
                [0.5 + 0.8 * a, 0.25 + 0.6 * b]
            }
        };
        let jitter = |rng: &mut ChaCha8Rng| noise * (rng.random::<f64>() * 2.0 - 1.0);
        points.push([x + jitter(&mut rng), y + jitter(&mut rng)]);
        labels.push(if positive {
            ClassLabel::NonRumour
        } else {
            ClassLabel::Rumour
        });
    }
    (points, labels)
}

/// Settings small enough to train interactively.
pub fn demo_config(algorithm: Algorithm, seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig::new(algorithm);
    cfg.seed = seed;
    match algorithm {
        Algorithm::Mlp => {
            cfg.hidden_sizes = (16, 8);
            cfg.learning_rate = 0.01;
            cfg.batch_size = 32;
            cfg.epochs = 150;
            cfg.dropout_p = 0.0;
        }
        Algorithm::Logreg => {
            cfg.learning_rate = 0.05;
            cfg.batch_size = 32;
        }
        Algorithm::Adaboost => cfg.boost_rounds = 50,
        _ => {}
    }
    cfg
}

#[derive(Serialize)]
struct Boundary {
    /// `[x, y, label]`, label 1 for non-rumour.
    points: Vec<[f64; 3]>,
    x_range: [f64; 2],
    y_range: [f64; 2],
    /// Row-major `resolution x resolution` labels, first row at `y_range[0]`.
    grid: Vec<u8>,
    resolution: usize,
    train_accuracy: f64,
}

const X_RANGE: [f64; 2] = [-1.75, 2.75];
const Y_RANGE: [f64; 2] = [-1.25, 1.75];

fn bit(label: ClassLabel) -> u8 {
    u8::from(label == ClassLabel::NonRumour)
}

/// Fit `algorithm` to a toy problem and label a grid over the plane.
pub fn boundary_json(
    algorithm: &str,
    shape: &str,
    n: usize,
    noise: f64,
    seed: u64,
    resolution: usize,
) -> Result<String, String> {
    let algorithm: Algorithm = algorithm.parse().map_err(|e: rumour_core::Error| e.to_string())?;
    let shape = Shape::parse(shape)?;
    if !(4..=2000).contains(&n) {
        return Err("points must be between 4 and 2000".into());
    }
    if !(2..=200).contains(&resolution) {
        return Err("resolution must be between 2 and 200".into());
    }
    let (pts, labels) = toy_data(shape, n, noise, seed);
    let x = Matrix::from_rows(&pts).map_err(|e| e.to_string())?;
    let model = fit(&x, &labels, &demo_config(algorithm, seed)).map_err(|e| e.to_string())?;
    let train = predict(&model, &x).map_err(|e| e.to_string())?;
    let correct = train.labels.iter().zip(&labels).filter(|(a, b)| a == b).count();

    let step = |r: [f64; 2], i: usize| r[0] + (r[1] - r[0]) * i as f64 / (resolution - 1) as f64;
    let mut cells = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            cells.push([step(X_RANGE, col), step(Y_RANGE, row)]);
        }
    }
    let grid = predict(&model, &Matrix::from_rows(&cells).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    let out = Boundary {
        points: pts
            .iter()
            .zip(&labels)
            .map(|(p, &l)| [p[0], p[1], f64::from(bit(l))])
            .collect(),
        x_range: X_RANGE,
        y_range: Y_RANGE,
        grid: grid.labels.into_iter().map(bit).collect(),
        resolution,
        train_accuracy: correct as f64 / n as f64,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = extractFeatures)]
pub fn extract_features(
    text: &str,
    followers: u32,
    friends: u32,
    verified: bool,
    is_retweet: bool,
) -> Result<String, JsError> {
    js(features_json(text, followers.into(), friends.into(), verified, is_retweet))
}

#[wasm_bindgen(js_name = confusionMetrics)]
pub fn confusion_metrics(tp: u32, fn_: u32, fp: u32, tn: u32) -> Result<String, JsError> {
    js(metrics_json(tp.into(), fn_.into(), fp.into(), tn.into()))
}

#[wasm_bindgen(js_name = decisionBoundary)]
pub fn decision_boundary(
    algorithm: &str,
    shape: &str,
    n: u32,
    noise: f64,
    seed: u32,
    resolution: u32,
) -> Result<String, JsError> {
    js(boundary_json(algorithm, shape, n as usize, noise, seed.into(), resolution as usize))
}
