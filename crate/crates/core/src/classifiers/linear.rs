//! Linear models: logistic regression trained with mini-batch Adam, and a
//! linear SVM trained by stochastic subgradient descent on the hinge loss.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::{Matrix, TrainConfig};
use crate::dataset::ClassLabel;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

fn label_of(score_positive: bool) -> ClassLabel {
    if score_positive {
        ClassLabel::NonRumour
    } else {
        ClassLabel::Rumour
    }
}

/// Logistic regression: label and `P(non-rumour)`.
pub fn logreg_predict(model: &LinearModel, x: &[f64]) -> (ClassLabel, f64) {
    let p = sigmoid(model.decision(x));
    (label_of(p >= 0.5), p)
}

/// Linear SVM: label and signed margin.
pub fn svm_predict(model: &LinearModel, x: &[f64]) -> (ClassLabel, f64) {
    let m = model.decision(x);
    (label_of(m >= 0.0), m)
}

/// Cross-entropy logistic regression with L2 on the weights (bias exempt).
pub fn fit_logreg(x: &Matrix, y: &[ClassLabel], cfg: &TrainConfig) -> Result<LinearModel> {
    let dim = x.cols();
    let mut model = LinearModel::zeros(dim);
    let mut w_state = AdamState::new(dim);
    let mut b_state = AdamState::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut grad_w = vec![0.0; dim];

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for &i in batch {
                let row = x.row(i);
                let err = sigmoid(model.decision(row)) - y[i].index() as f64;
                for (g, v) in grad_w.iter_mut().zip(row) {
                    *g += err * v;
                }
                grad_b += err;
            }
            let n = batch.len() as f64;
            for (g, w) in grad_w.iter_mut().zip(&model.weights) {
                *g = *g / n + cfg.weight_decay * w;
            }
            adam_step(&mut model.weights, &grad_w, &mut w_state, cfg.learning_rate)?;
            let mut b = [model.bias];
            adam_step(&mut b, &[grad_b / n], &mut b_state, cfg.learning_rate)?;
            model.bias = b[0];
        }
    }
    Ok(model)
}

/// Minimises `lambda * |w|^2 + mean(hinge)` by sampling one example per step.
///
/// Step size is `1 / (1 + 2 * lambda * t)`, the Pegasos schedule shifted so
/// the first step is 1. The bias takes the same steps and is not shrunk.
/// Runs `epochs * n` steps.
pub fn fit_linear_svm(x: &Matrix, y: &[ClassLabel], cfg: &TrainConfig) -> Result<LinearModel> {
    let dim = x.cols();
    let n = x.rows();
    let mut model = LinearModel::zeros(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reg = 2.0 * cfg.svm_lambda;
    let steps = cfg.epochs.saturating_mul(n).max(1);

    for t in 0..steps {
        let i = rng.random_range(0..n);
        let row = x.row(i);
        let target = if y[i] == ClassLabel::NonRumour { 1.0 } else { -1.0 };
        let eta = 1.0 / (1.0 + reg * t as f64);
        let violated = target * model.decision(row) < 1.0;
        let shrink = 1.0 - eta * reg;
        for (w, v) in model.weights.iter_mut().zip(row) {
            *w *= shrink;
            if violated {
                *w += eta * target * v;
            }
        }
        if violated {
            model.bias += eta * target;
        }
    }
    Ok(model)
}
