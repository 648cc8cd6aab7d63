//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::dataset::ClassLabel;

/// Variance floor as a fraction of the largest per-feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    /// Indexed by [`ClassLabel::index`].
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub log_priors: [f64; 2],
    pub epsilon: f64,
}

fn mean_var<'a>(rows: impl Iterator<Item = &'a [f64]> + Clone, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.clone().count().max(1) as f64;
    let mut mean = vec![0.0; dim];
    for r in rows.clone() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for r in rows {
        for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

impl GnbModel {
    /// Requires both classes in `y`.
    pub fn fit(x: &Matrix, y: &[ClassLabel]) -> Self {
        let dim = x.cols();
        let (_, all_var) = mean_var(x.iter_rows(), dim);
        let max_var = all_var.iter().cloned().fold(0.0, f64::max);
        let epsilon = if max_var > 0.0 {
            VAR_SMOOTHING * max_var
        } else {
            VAR_SMOOTHING
        };

        let n = y.len() as f64;
        let stats = |class: ClassLabel| {
            let rows = x
                .iter_rows()
                .zip(y)
                .filter(move |(_, &l)| l == class)
                .map(|(r, _)| r);
            let count = rows.clone().count() as f64;
            let (mean, mut var) = mean_var(rows, dim);
            var.iter_mut().for_each(|v| *v += epsilon);
            (mean, var, (count / n).ln())
        };
        let (m0, v0, p0) = stats(ClassLabel::from_index(0));
        let (m1, v1, p1) = stats(ClassLabel::from_index(1));
        GnbModel {
            means: [m0, m1],
            variances: [v0, v1],
            log_priors: [p0, p1],
            epsilon,
        }
    }

    /// `log P(c) + sum_j log N(x_j; mean_cj, var_cj)` for both classes.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> [f64; 2] {
        let ll = |c: usize| {
            let mut s = self.log_priors[c];
            for ((xj, m), v) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                s -= 0.5 * (2.0 * std::f64::consts::PI * v).ln();
                s -= (xj - m) * (xj - m) / (2.0 * v);
            }
            s
        };
        [ll(0), ll(1)]
    }

    /// Label and posterior probability of non-rumour.
    pub fn predict_one(&self, x: &[f64]) -> (ClassLabel, f64) {
        let jll = self.joint_log_likelihood(x);
        let max = jll[0].max(jll[1]);
        let e0 = (jll[0] - max).exp();
        let e1 = (jll[1] - max).exp();
        let p1 = e1 / (e0 + e1);
        let label = if jll[1] >= jll[0] {
            ClassLabel::NonRumour
        } else {
            ClassLabel::Rumour
        };
        (label, p1)
    }
}
