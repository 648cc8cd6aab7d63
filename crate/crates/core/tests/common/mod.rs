//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the code under test except for types.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rumour_core::classifiers::mlp::Mode;
use rumour_core::classifiers::{Matrix, MlpModel};
use rumour_core::ClassLabel;

pub use ClassLabel::{NonRumour as NR, Rumour as R};

/// Reference confusion matrices as `(name, tp, fn, fp, tn)`,
/// with the expected metrics in the order accuracy, all-class P/R/F1,
/// non-rumour P/R/F1, rumour P/R/F1.
pub const REFERENCE: [(&str, [u64; 4], [f64; 10]); 12] = [
    ("svm/bert", [1000, 160, 155, 422], [0.819, 0.795, 0.797, 0.796, 0.866, 0.862, 0.864, 0.725, 0.731, 0.728]),
    ("svm/features", [1035, 125, 332, 245], [0.737, 0.710, 0.658, 0.683, 0.757, 0.892, 0.819, 0.662, 0.425, 0.517]),
    ("logreg/bert", [1020, 140, 154, 423], [0.831, 0.810, 0.806, 0.808, 0.869, 0.879, 0.874, 0.751, 0.733, 0.742]),
    ("logreg/features", [1037, 123, 332, 245], [0.738, 0.712, 0.659, 0.684, 0.757, 0.894, 0.820, 0.666, 0.425, 0.519]),
    ("nb/bert", [835, 325, 131, 446], [0.737, 0.721, 0.746, 0.734, 0.864, 0.720, 0.786, 0.578, 0.773, 0.662]),
    ("nb/features", [645, 515, 129, 448], [0.629, 0.649, 0.666, 0.658, 0.833, 0.556, 0.667, 0.465, 0.776, 0.582]),
    ("adaboost/bert", [983, 177, 198, 379], [0.784, 0.757, 0.752, 0.755, 0.832, 0.847, 0.840, 0.682, 0.657, 0.669]),
    ("adaboost/features", [1001, 159, 298, 281], [0.738, 0.705, 0.675, 0.690, 0.772, 0.863, 0.815, 0.639, 0.487, 0.553]),
    ("knn/bert", [989, 171, 108, 469], [0.839, 0.817, 0.833, 0.825, 0.902, 0.853, 0.876, 0.733, 0.813, 0.771]),
    ("knn/features", [914, 246, 260, 317], [0.709, 0.671, 0.669, 0.670, 0.779, 0.788, 0.783, 0.563, 0.549, 0.556]),
    ("mlp/bert", [1016, 144, 125, 452], [0.845, 0.824, 0.830, 0.827, 0.890, 0.876, 0.883, 0.758, 0.783, 0.771]),
    ("mlp/features", [972, 188, 237, 340], [0.755, 0.724, 0.714, 0.719, 0.804, 0.838, 0.821, 0.644, 0.589, 0.615]),
];

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<ClassLabel> {
    let mut y: Vec<ClassLabel> = (0..n).map(|_| if rng.random_bool(0.5) { NR } else { R }).collect();
    y[0] = NR;
    if n > 1 {
        y[1] = R;
    }
    y
}

/// Points with a margin around the line `x0 + 0.5 x1 = 0.3`.
pub fn separable_2d(n: usize, seed: u64) -> (Matrix, Vec<ClassLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    while rows.len() < n {
        let p: [f64; 2] = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let s = p[0] + 0.5 * p[1] - 0.3;
        if s.abs() < 0.25 {
            continue;
        }
        y.push(if s > 0.0 { NR } else { R });
        rows.push(p);
    }
    (Matrix::from_rows(&rows).unwrap(), y)
}

/// Label and non-rumour vote share from a full sort of all distances.
/// Order: distance, then non-rumour before rumour, then training index.
/// A tied vote goes to the nearest neighbour.
pub fn knn_brute_force(points: &Matrix, labels: &[ClassLabel], k: usize, q: &[f64]) -> (Vec<usize>, ClassLabel, f64) {
    let mut all: Vec<(f64, u8, usize)> = (0..points.rows())
        .map(|i| {
            let d: f64 = points.row(i).iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
            (d, u8::from(labels[i] == R), i)
        })
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nn: Vec<usize> = all.iter().take(k.min(all.len())).map(|t| t.2).collect();
    let nr = nn.iter().filter(|&&i| labels[i] == NR).count();
    let label = if 2 * nr > nn.len() {
        NR
    } else if 2 * nr < nn.len() {
        R
    } else {
        labels[nn[0]]
    };
    (nn.clone(), label, nr as f64 / nn.len() as f64)
}

/// Gaussian log joint likelihoods `[rumour, non-rumour]` in closed form.
pub fn gnb_closed_form(x: &Matrix, y: &[ClassLabel], q: &[f64]) -> [f64; 2] {
    let n = x.rows() as f64;
    let d = x.cols();
    let mut max_var: f64 = 0.0;
    for j in 0..d {
        let col: Vec<f64> = (0..x.rows()).map(|i| x.get(i, j)).collect();
        let m = col.iter().sum::<f64>() / n;
        max_var = max_var.max(col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n);
    }
    let eps = 1e-9 * if max_var > 0.0 { max_var } else { 1.0 };
    let mut out = [0.0; 2];
    for (slot, class) in [(0, R), (1, NR)] {
        let idx: Vec<usize> = (0..x.rows()).filter(|&i| y[i] == class).collect();
        let nc = idx.len() as f64;
        let mut s = (nc / n).ln();
        for j in 0..d {
            let m = idx.iter().map(|&i| x.get(i, j)).sum::<f64>() / nc;
            let v = idx.iter().map(|&i| (x.get(i, j) - m).powi(2)).sum::<f64>() / nc + eps;
            s += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (q[j] - m).powi(2) / (2.0 * v);
        }
        out[slot] = s;
    }
    out
}

fn loss_at(model: &MlpModel, x: &Matrix, y: &[ClassLabel], wd: f64) -> f64 {
    let cache = model.forward(x, Mode::Eval).unwrap();
    model.loss(&cache, y, wd)
}

/// Largest relative error between the analytic MLP gradient and central
/// differences, per parameter tensor (`w0, b0, w1, b1, w2, b2`).
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-7)`; the floor keeps
/// coordinates whose true gradient is ~0 from dividing rounding noise by
/// nothing.
pub fn mlp_gradient_check(seed: u64, weight_decay: f64) -> Vec<f64> {
    const EPS: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MlpModel::init(6, (8, 5), &mut rng);
    for layer in &mut model.layers {
        for b in &mut layer.biases {
            *b = rng.random_range(-0.1..0.1);
        }
    }
    let x = random_matrix(&mut rng, 10, 6);
    let y = random_labels(&mut rng, 10);
    let cache = model.forward(&x, Mode::Eval).unwrap();
    let grads = model.backward(&cache, &y, weight_decay).unwrap();

    let mut worst = Vec::new();
    for li in 0..model.layers.len() {
        for is_bias in [false, true] {
            let len = if is_bias { model.layers[li].biases.len() } else { model.layers[li].weights.len() };
            let mut tensor_worst: f64 = 0.0;
            for k in 0..len {
                let mut plus = model.clone();
                let mut minus = model.clone();
                let (p, m) = if is_bias {
                    (&mut plus.layers[li].biases[k], &mut minus.layers[li].biases[k])
                } else {
                    (&mut plus.layers[li].weights[k], &mut minus.layers[li].weights[k])
                };
                *p += EPS;
                *m -= EPS;
                let numeric = (loss_at(&plus, &x, &y, weight_decay) - loss_at(&minus, &x, &y, weight_decay)) / (2.0 * EPS);
                let analytic = if is_bias { grads.biases[li][k] } else { grads.weights[li][k] };
                let denom = analytic.abs().max(numeric.abs()).max(1e-7);
                tensor_worst = tensor_worst.max((analytic - numeric).abs() / denom);
            }
            worst.push(tensor_worst);
        }
    }
    worst
}

pub fn accuracy(pred: &[ClassLabel], truth: &[ClassLabel]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}
