//! Discrete AdaBoost over depth-1 threshold stumps.

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::dataset::ClassLabel;

/// Weighted errors are clamped to `[ERR_CLAMP, 1 - ERR_CLAMP]` before
/// computing a stump weight.
pub const ERR_CLAMP: f64 = 1e-10;

/// Votes `polarity` when `x[feature] > threshold`, `-polarity` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
    pub alpha: f64,
}

impl Stump {
    pub fn vote(&self, x: &[f64]) -> f64 {
        let p = f64::from(self.polarity);
        if x[self.feature] > self.threshold {
            p
        } else {
            -p
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaboostModel {
    pub stumps: Vec<Stump>,
    /// Weighted training error of each round's stump, before clamping.
    pub round_errors: Vec<f64>,
}

fn target(label: ClassLabel) -> f64 {
    if label == ClassLabel::NonRumour {
        1.0
    } else {
        -1.0
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    polarity: i8,
    error: f64,
}

/// Lowest weighted-error stump. Features, thresholds and polarities are
/// scanned in ascending order and only a strictly better stump replaces the
/// current best, so the result is deterministic.
fn best_stump(x: &Matrix, t: &[f64], w: &[f64], sorted: &[Vec<usize>]) -> Candidate {
    let total_pos: f64 = w.iter().zip(t).filter(|(_, &y)| y > 0.0).map(|(w, _)| w).sum();
    let total_neg: f64 = w.iter().zip(t).filter(|(_, &y)| y < 0.0).map(|(w, _)| w).sum();
    let mut best = Candidate {
        feature: 0,
        threshold: 0.0,
        polarity: 1,
        error: f64::INFINITY,
    };
    for (f, order) in sorted.iter().enumerate() {
        let value = |j: usize| x.get(order[j], f);
        let n = order.len();
        // weight of positives / negatives strictly below the split point
        let (mut left_pos, mut left_neg) = (0.0, 0.0);
        for j in 0..n {
            if j == 0 || value(j - 1) < value(j) {
                let threshold = if j == 0 {
                    value(0) - value(0).abs().max(1.0)
                } else {
                    let (a, b) = (value(j - 1), value(j));
                    let mid = a + (b - a) / 2.0;
                    if mid < b { mid } else { a }
                };
                // polarity +1: left votes -1, right votes +1
                let err_pos = left_pos + (total_neg - left_neg);
                let err_neg = left_neg + (total_pos - left_pos);
                for (polarity, error) in [(1i8, err_pos), (-1i8, err_neg)] {
                    if error < best.error {
                        best = Candidate {
                            feature: f,
                            threshold,
                            polarity,
                            error,
                        };
                    }
                }
            }
            let i = order[j];
            if t[i] > 0.0 {
                left_pos += w[i];
            } else {
                left_neg += w[i];
            }
        }
    }
    best.error = best.error.max(0.0);
    best
}

impl AdaboostModel {
    /// Requires both classes in `y`. Stops early once a stump classifies the
    /// weighted sample perfectly.
    pub fn fit(x: &Matrix, y: &[ClassLabel], rounds: usize) -> Self {
        let n = x.rows();
        let t: Vec<f64> = y.iter().map(|&l| target(l)).collect();
        let sorted: Vec<Vec<usize>> = (0..x.cols())
            .map(|f| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
                idx
            })
            .collect();

        let mut w = vec![1.0 / n as f64; n];
        let mut model = AdaboostModel {
            stumps: Vec::new(),
            round_errors: Vec::new(),
        };
        for _ in 0..rounds {
            let c = best_stump(x, &t, &w, &sorted);
            let err = c.error.clamp(ERR_CLAMP, 1.0 - ERR_CLAMP);
            let alpha = 0.5 * ((1.0 - err) / err).ln();
            let stump = Stump {
                feature: c.feature,
                threshold: c.threshold,
                polarity: c.polarity,
                alpha,
            };
            for (i, wi) in w.iter_mut().enumerate() {
                *wi *= (-alpha * t[i] * stump.vote(x.row(i))).exp();
            }
            let z: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= z);
            model.round_errors.push(c.error);
            model.stumps.push(stump);
            if c.error <= ERR_CLAMP {
                break;
            }
        }
        model
    }

    /// Weighted vote `sum(alpha * h(x))`.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.stumps.iter().map(|s| s.alpha * s.vote(x)).sum()
    }

    pub fn predict_one(&self, x: &[f64]) -> (ClassLabel, f64) {
        let m = self.margin(x);
        let label = if m >= 0.0 {
            ClassLabel::NonRumour
        } else {
            ClassLabel::Rumour
        };
        (label, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn threshold_separable_in_one_round() {
        let x = Matrix::from_rows(&[[0.5], [1.0], [2.0], [3.0], [4.5]]).unwrap();
        let y = [Rumour, Rumour, Rumour, NonRumour, NonRumour];
        let m = AdaboostModel::fit(&x, &y, 100);
        assert_eq!(m.stumps.len(), 1);
        assert_eq!(m.round_errors[0], 0.0);
        assert_eq!(m.stumps[0].threshold, 2.5);
        for (row, &label) in x.iter_rows().zip(&y) {
            assert_eq!(m.predict_one(row).0, label);
        }
    }

    #[test]
    fn reversed_polarity() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let y = [NonRumour, NonRumour, Rumour, Rumour];
        let m = AdaboostModel::fit(&x, &y, 10);
        assert_eq!(m.stumps[0].polarity, -1);
        assert_eq!(m.round_errors[0], 0.0);
    }
}
