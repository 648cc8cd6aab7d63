//! Six binary classifiers over real-valued vectors.
//!
//! Class 1 is non-rumour. Inputs are z-scored with training statistics for
//! knn, logreg, svm and mlp; gnb and adaboost see raw values. Training is
//! single-threaded and reproducible bit for bit from `TrainConfig::seed`.

pub mod adaboost;
pub mod adam;
pub mod gnb;
pub mod knn;
pub mod linear;
pub mod matrix;
pub mod mlp;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::ClassLabel;
use crate::{Error, Result};

pub use adaboost::{AdaboostModel, Stump};
pub use adam::{adam_step, AdamState};
pub use gnb::GnbModel;
pub use knn::KnnModel;
pub use linear::LinearModel;
pub use matrix::Matrix;
pub use mlp::{mlp_backward, mlp_forward, ForwardCache, Gradients, MlpModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Knn,
    Gnb,
    Logreg,
    Svm,
    Adaboost,
    Mlp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Svm,
        Algorithm::Logreg,
        Algorithm::Gnb,
        Algorithm::Adaboost,
        Algorithm::Knn,
        Algorithm::Mlp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Knn => "knn",
            Algorithm::Gnb => "gnb",
            Algorithm::Logreg => "logreg",
            Algorithm::Svm => "svm",
            Algorithm::Adaboost => "adaboost",
            Algorithm::Mlp => "mlp",
        }
    }

    fn standardizes(self) -> bool {
        !matches!(self, Algorithm::Gnb | Algorithm::Adaboost)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub weight_decay: f64,
    pub dropout_p: f64,
    pub k_neighbors: usize,
    pub boost_rounds: usize,
    pub svm_lambda: f64,
    pub hidden_sizes: (usize, usize),
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        TrainConfig {
            algorithm,
            seed: 0,
            learning_rate: 0.0002,
            batch_size: 512,
            epochs: 100,
            weight_decay: 1e-5,
            dropout_p: 0.5,
            k_neighbors: 5,
            boost_rounds: 100,
            svm_lambda: 1e-4,
            hidden_sizes: (256, 64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be > 0, got {}", self.learning_rate));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return fail(format!("dropout_p must be in [0, 1), got {}", self.dropout_p));
        }
        if !(self.weight_decay >= 0.0) {
            return fail(format!("weight_decay must be >= 0, got {}", self.weight_decay));
        }
        if self.k_neighbors == 0 || self.boost_rounds == 0 || self.epochs == 0 {
            return fail("k_neighbors, boost_rounds and epochs must be at least 1".into());
        }
        if !(self.svm_lambda > 0.0) {
            return fail(format!("svm_lambda must be > 0, got {}", self.svm_lambda));
        }
        if self.hidden_sizes.0 == 0 || self.hidden_sizes.1 == 0 {
            return fail("hidden sizes must be at least 1".into());
        }
        Ok(())
    }
}

/// Per-dimension z-scoring with training mean and population standard
/// deviation; constant dimensions get a scale of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let n = x.rows().max(1) as f64;
        let mut mean = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for r in 0..out.rows() {
            for ((v, m), s) in out.row_mut(r).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", content = "params", rename_all = "lowercase")]
pub enum ModelParams {
    Knn(KnnModel),
    Gnb(GnbModel),
    Logreg(LinearModel),
    Svm(LinearModel),
    Adaboost(AdaboostModel),
    Mlp(MlpModel),
}

impl ModelParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ModelParams::Knn(_) => Algorithm::Knn,
            ModelParams::Gnb(_) => Algorithm::Gnb,
            ModelParams::Logreg(_) => Algorithm::Logreg,
            ModelParams::Svm(_) => Algorithm::Svm,
            ModelParams::Adaboost(_) => Algorithm::Adaboost,
            ModelParams::Mlp(_) => Algorithm::Mlp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: TrainConfig,
    pub input_dim: usize,
    pub standardizer: Option<Standardizer>,
    pub model: ModelParams,
    /// Hash of the run configuration that produced the model, set by callers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub labels: Vec<ClassLabel>,
    /// `P(non-rumour)` for logreg, gnb and mlp; signed margin for svm and
    /// adaboost; fraction of non-rumour votes for knn.
    pub scores: Vec<f64>,
}

fn check_training_data(x: &Matrix, y: &[ClassLabel]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::Validation("empty training matrix".into()));
    }
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite training value".into()));
    }
    for class in ClassLabel::ALL {
        if !y.contains(&class) {
            return Err(Error::Validation(format!(
                "training labels contain no {class} examples"
            )));
        }
    }
    Ok(())
}

pub fn fit(x: &Matrix, y: &[ClassLabel], config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    check_training_data(x, y)?;
    let standardizer = config.algorithm.standardizes().then(|| Standardizer::fit(x));
    let prepared;
    let xs = match &standardizer {
        Some(s) => {
            prepared = s.transform(x);
            &prepared
        }
        None => x,
    };
    let model = match config.algorithm {
        Algorithm::Knn => ModelParams::Knn(KnnModel::fit(xs.clone(), y.to_vec(), config.k_neighbors)),
        Algorithm::Gnb => ModelParams::Gnb(GnbModel::fit(xs, y)),
        Algorithm::Logreg => ModelParams::Logreg(linear::fit_logreg(xs, y, config)?),
        Algorithm::Svm => ModelParams::Svm(linear::fit_linear_svm(xs, y, config)?),
        Algorithm::Adaboost => ModelParams::Adaboost(AdaboostModel::fit(xs, y, config.boost_rounds)),
        Algorithm::Mlp => ModelParams::Mlp(mlp::fit_mlp(xs, y, config)?),
    };
    Ok(TrainedModel {
        config: config.clone(),
        input_dim: x.cols(),
        standardizer,
        model,
        config_hash: None,
    })
}

pub fn predict(model: &TrainedModel, x: &Matrix) -> Result<Prediction> {
    if x.cols() != model.input_dim {
        return Err(Error::Shape(format!(
            "model expects {} features, got {}",
            model.input_dim,
            x.cols()
        )));
    }
    let prepared;
    let xs = match &model.standardizer {
        Some(s) => {
            prepared = s.transform(x);
            &prepared
        }
        None => x,
    };
    let pairs: Vec<(ClassLabel, f64)> = match &model.model {
        ModelParams::Knn(m) => xs.iter_rows().map(|r| m.predict_one(r)).collect(),
        ModelParams::Gnb(m) => xs.iter_rows().map(|r| m.predict_one(r)).collect(),
        ModelParams::Logreg(m) => xs.iter_rows().map(|r| linear::logreg_predict(m, r)).collect(),
        ModelParams::Svm(m) => xs.iter_rows().map(|r| linear::svm_predict(m, r)).collect(),
        ModelParams::Adaboost(m) => xs.iter_rows().map(|r| m.predict_one(r)).collect(),
        ModelParams::Mlp(m) => m.predict(xs)?,
    };
    let (labels, scores) = pairs.into_iter().unzip();
    Ok(Prediction { labels, scores })
}

/// Model file: pretty-printed JSON with the algorithm tag, the config echo,
/// the standardisation vectors and the parameters.
pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(model).map_err(|e| Error::io(path, e.into()))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: TrainedModel = serde_json::from_str(&json).map_err(|e| Error::parse(path, e))?;
    if model.model.algorithm() != model.config.algorithm {
        return Err(Error::parse(path, "algorithm tag does not match config"));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("forest".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_checks() {
        let mut c = TrainConfig::new(Algorithm::Mlp);
        c.validate().unwrap();
        c.dropout_p = 1.0;
        assert!(c.validate().is_err());
        c.dropout_p = 0.5;
        c.learning_rate = 0.0;
        assert!(c.validate().is_err());
        c.learning_rate = 0.1;
        c.batch_size = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_class_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let err = fit(&x, &[Rumour, Rumour], &TrainConfig::new(Algorithm::Knn)).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let m = fit(&x, &[Rumour, NonRumour], &TrainConfig::new(Algorithm::Gnb)).unwrap();
        let q = Matrix::from_rows(&[[0.0, 1.0]]).unwrap();
        assert!(matches!(predict(&m, &q), Err(Error::Shape(_))));
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let x = Matrix::from_rows(&[[1.0, 5.0], [3.0, 5.0]]).unwrap();
        let s = Standardizer::fit(&x);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.transform(&x).data(), &[-1.0, 0.0, 1.0, 0.0]);
    }
}
