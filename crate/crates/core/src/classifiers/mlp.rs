//! Four-layer perceptron: input, two ReLU hidden layers, and a two-way
//! softmax output, trained on cross-entropy with Adam.
//!
//! Inverted dropout is applied to both hidden activations in training mode
//! only; surviving units are scaled by `1 / (1 - p)` so evaluation needs no
//! rescaling. L2 weight decay adds `weight_decay * W` to every weight
//! gradient (biases are exempt), which is the gradient of
//! `weight_decay / 2 * sum(W^2)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::{Matrix, TrainConfig};
use crate::dataset::ClassLabel;
use crate::{Error, Result};

pub const N_CLASSES: usize = 2;

/// Fully connected layer. `weights` is `inputs x outputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn new(inputs: usize, outputs: usize, std_dev: f64, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, std_dev).expect("positive std dev");
        Dense {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| normal.sample(rng)).collect(),
            biases: vec![0.0; outputs],
        }
    }

    fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &Matrix) -> Matrix {
        let mut z = x.matmul_flat(&self.weights, self.outputs);
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.biases) {
                *v += b;
            }
        }
        z
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Exactly three weight layers: input→h1, h1→h2, h2→output.
    pub layers: Vec<Dense>,
    /// Mean training loss per epoch (including the decay term).
    #[serde(default)]
    pub loss_history: Vec<f64>,
}

/// How the forward pass treats dropout.
pub enum Mode<'a> {
    Eval,
    Train {
        dropout_p: f64,
        rng: &'a mut ChaCha8Rng,
    },
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Matrix,
    /// Pre-activations of each layer.
    pub pre: Vec<Matrix>,
    /// Hidden outputs after ReLU and dropout; these feed the next layer.
    pub hidden: Vec<Matrix>,
    /// Scaled dropout masks per hidden layer (`None` when no dropout).
    pub masks: Vec<Option<Vec<f64>>>,
    /// Softmax output, `rows x 2`.
    pub probs: Matrix,
}

/// Gradients with the same shapes as [`MlpModel::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

pub fn softmax_rows(z: &Matrix) -> Matrix {
    let mut out = z.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    out
}

impl MlpModel {
    /// He-normal hidden weights, Glorot-normal output weights, zero biases.
    pub fn init(input_dim: usize, hidden: (usize, usize), rng: &mut ChaCha8Rng) -> Self {
        let (h1, h2) = hidden;
        let he = |fan_in: usize| (2.0 / fan_in as f64).sqrt();
        let out_std = (2.0 / (h2 + N_CLASSES) as f64).sqrt();
        MlpModel {
            layers: vec![
                Dense::new(input_dim, h1, he(input_dim), rng),
                Dense::new(h1, h2, he(h1), rng),
                Dense::new(h2, N_CLASSES, out_std, rng),
            ],
            loss_history: Vec::new(),
        }
    }

    /// All weights and biases zero.
    pub fn zeros(input_dim: usize, hidden: (usize, usize)) -> Self {
        MlpModel {
            layers: vec![
                Dense::zeros(input_dim, hidden.0),
                Dense::zeros(hidden.0, hidden.1),
                Dense::zeros(hidden.1, N_CLASSES),
            ],
            loss_history: Vec::new(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    /// Sum of squared weights over all layers (biases excluded).
    pub fn weight_sq_norm(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| &l.weights)
            .map(|w| w * w)
            .sum()
    }

    pub fn forward(&self, x: &Matrix, mode: Mode<'_>) -> Result<ForwardCache> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "mlp expects {} inputs, got {}",
                self.input_dim(),
                x.cols()
            )));
        }
        let (dropout_p, mut rng) = match mode {
            Mode::Eval => (0.0, None),
            Mode::Train { dropout_p, rng } => (dropout_p, Some(rng)),
        };
        let mut pre = Vec::with_capacity(3);
        let mut hidden = Vec::with_capacity(2);
        let mut masks = Vec::with_capacity(2);
        let mut current = x.clone();
        for layer in &self.layers[..2] {
            let z = layer.forward(&current);
            let mut a = z.clone();
            a.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
            let mask = match rng.as_deref_mut() {
                Some(rng) if dropout_p > 0.0 => {
                    let keep = 1.0 - dropout_p;
                    let scale = 1.0 / keep;
                    let m: Vec<f64> = (0..a.data().len())
                        .map(|_| if rng.random::<f64>() < keep { scale } else { 0.0 })
                        .collect();
                    a.data_mut().iter_mut().zip(&m).for_each(|(v, s)| *v *= s);
                    Some(m)
                }
                _ => None,
            };
            pre.push(z);
            masks.push(mask);
            hidden.push(a.clone());
            current = a;
        }
        let logits = self.layers[2].forward(&current);
        let probs = softmax_rows(&logits);
        pre.push(logits);
        Ok(ForwardCache {
            input: x.clone(),
            pre,
            hidden,
            masks,
            probs,
        })
    }

    /// Mean cross-entropy of the cached probabilities plus
    /// `weight_decay / 2 * sum(W^2)`.
    pub fn loss(&self, cache: &ForwardCache, y: &[ClassLabel], weight_decay: f64) -> f64 {
        let n = y.len() as f64;
        let ce: f64 = y
            .iter()
            .enumerate()
            .map(|(i, l)| -cache.probs.get(i, l.index()).max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / n;
        ce + 0.5 * weight_decay * self.weight_sq_norm()
    }

    /// Gradients of [`MlpModel::loss`] with respect to every weight and bias.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        y: &[ClassLabel],
        weight_decay: f64,
    ) -> Result<Gradients> {
        let n = y.len();
        if cache.probs.rows() != n {
            return Err(Error::Shape(format!(
                "{} labels for a batch of {}",
                n,
                cache.probs.rows()
            )));
        }
        let mut delta = cache.probs.clone();
        for (i, l) in y.iter().enumerate() {
            let row = delta.row_mut(i);
            row[l.index()] -= 1.0;
            row.iter_mut().for_each(|v| *v /= n as f64);
        }

        let mut gw = vec![Vec::new(); 3];
        let mut gb = vec![Vec::new(); 3];
        for li in (0..3).rev() {
            let layer = &self.layers[li];
            let input = if li == 0 { &cache.input } else { &cache.hidden[li - 1] };
            let mut w_grad = input.t_matmul(&delta);
            for (g, w) in w_grad.iter_mut().zip(&layer.weights) {
                *g += weight_decay * w;
            }
            let mut b_grad = vec![0.0; layer.outputs];
            for row in delta.iter_rows() {
                for (g, d) in b_grad.iter_mut().zip(row) {
                    *g += d;
                }
            }
            gw[li] = w_grad;
            gb[li] = b_grad;

            if li > 0 {
                let mut prev = delta.matmul_t_flat(&layer.weights, layer.inputs);
                let h = li - 1;
                if let Some(mask) = &cache.masks[h] {
                    prev.data_mut().iter_mut().zip(mask).for_each(|(d, m)| *d *= m);
                }
                prev.data_mut()
                    .iter_mut()
                    .zip(cache.pre[h].data())
                    .for_each(|(d, &z)| {
                        if z <= 0.0 {
                            *d = 0.0
                        }
                    });
                delta = prev;
            }
        }
        Ok(Gradients {
            weights: gw,
            biases: gb,
        })
    }

    /// Label and softmax probability of non-rumour for each row.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<(ClassLabel, f64)>> {
        let cache = self.forward(x, Mode::Eval)?;
        Ok(cache
            .probs
            .iter_rows()
            .map(|p| {
                let label = if p[1] >= p[0] {
                    ClassLabel::NonRumour
                } else {
                    ClassLabel::Rumour
                };
                (label, p[1])
            })
            .collect())
    }
}

/// Forward pass with an explicit seed for the dropout masks.
pub fn mlp_forward(
    model: &MlpModel,
    x: &Matrix,
    training_mode: bool,
    dropout_p: f64,
    seed: u64,
) -> Result<ForwardCache> {
    if training_mode {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        model.forward(
            x,
            Mode::Train {
                dropout_p,
                rng: &mut rng,
            },
        )
    } else {
        model.forward(x, Mode::Eval)
    }
}

pub fn mlp_backward(
    model: &MlpModel,
    cache: &ForwardCache,
    y: &[ClassLabel],
    weight_decay: f64,
) -> Result<Gradients> {
    model.backward(cache, y, weight_decay)
}

/// Mini-batch Adam training. One generator seeded from `cfg.seed` drives
/// initialisation, the per-epoch shuffles and the dropout masks.
pub fn fit_mlp(x: &Matrix, y: &[ClassLabel], cfg: &TrainConfig) -> Result<MlpModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = MlpModel::init(x.cols(), cfg.hidden_sizes, &mut rng);
    let mut states: Vec<(AdamState, AdamState)> = model
        .layers
        .iter()
        .map(|l| (AdamState::new(l.weights.len()), AdamState::new(l.biases.len())))
        .collect();
    let mut order: Vec<usize> = (0..x.rows()).collect();

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let xb = x.select_rows(batch);
            let yb: Vec<ClassLabel> = batch.iter().map(|&i| y[i]).collect();
            let cache = model.forward(
                &xb,
                Mode::Train {
                    dropout_p: cfg.dropout_p,
                    rng: &mut rng,
                },
            )?;
            epoch_loss += model.loss(&cache, &yb, cfg.weight_decay) * batch.len() as f64;
            let grads = model.backward(&cache, &yb, cfg.weight_decay)?;
            for (li, layer) in model.layers.iter_mut().enumerate() {
                let (ws, bs) = &mut states[li];
                adam_step(&mut layer.weights, &grads.weights[li], ws, cfg.learning_rate)?;
                adam_step(&mut layer.biases, &grads.biases[li], bs, cfg.learning_rate)?;
            }
        }
        model.loss_history.push(epoch_loss / x.rows() as f64);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_even_odds() {
        let m = MlpModel::zeros(3, (4, 2));
        let x = Matrix::from_rows(&[[1.0, -2.0, 3.0], [0.0, 5.0, 1.0]]).unwrap();
        let c = m.forward(&x, Mode::Eval).unwrap();
        for p in c.probs.iter_rows() {
            assert_eq!(p, &[0.5, 0.5]);
        }
    }

    #[test]
    fn zero_dropout_training_equals_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = MlpModel::init(3, (8, 4), &mut rng);
        let x = Matrix::from_rows(&[[1.0, -2.0, 3.0], [0.5, 5.0, 1.0]]).unwrap();
        let eval = mlp_forward(&m, &x, false, 0.0, 1).unwrap();
        let train = mlp_forward(&m, &x, true, 0.0, 1).unwrap();
        assert_eq!(eval.probs, train.probs);
        assert_eq!(eval.hidden, train.hidden);
    }

    #[test]
    fn wrong_width_is_rejected() {
        let m = MlpModel::zeros(3, (4, 2));
        let x = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(m.forward(&x, Mode::Eval).is_err());
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let z = Matrix::from_rows(&[[1000.0, -1000.0], [0.3, 0.2], [-5.0, 7.0]]).unwrap();
        for row in softmax_rows(&z).iter_rows() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
