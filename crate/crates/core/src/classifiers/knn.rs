//! k-nearest neighbours with Euclidean distance.
//!
//! Neighbours are ranked by distance; equal distances put non-rumour
//! points first, then the smaller training index. A tied vote goes to the
//! label of the single nearest neighbour.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::dataset::ClassLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub points: Matrix,
    pub labels: Vec<ClassLabel>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn label_rank(label: ClassLabel) -> u8 {
    match label {
        ClassLabel::NonRumour => 0,
        ClassLabel::Rumour => 1,
    }
}

impl KnnModel {
    pub fn fit(points: Matrix, labels: Vec<ClassLabel>, k: usize) -> Self {
        KnnModel { k, points, labels }
    }

    fn effective_k(&self) -> usize {
        self.k.min(self.labels.len()).max(1)
    }

    /// Training indices of the `k` nearest neighbours, nearest first.
    pub fn nearest(&self, query: &[f64]) -> Vec<usize> {
        let mut cand: Vec<(f64, u8, usize)> = self
            .points
            .iter_rows()
            .enumerate()
            .map(|(i, p)| (squared_distance(p, query), label_rank(self.labels[i]), i))
            .collect();
        let cmp = |a: &(f64, u8, usize), b: &(f64, u8, usize)| -> Ordering {
            a.0.total_cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        };
        let k = self.effective_k();
        if k < cand.len() {
            cand.select_nth_unstable_by(k - 1, cmp);
            cand.truncate(k);
        }
        cand.sort_unstable_by(cmp);
        cand.into_iter().map(|c| c.2).collect()
    }

    /// Label and fraction of non-rumour votes.
    pub fn predict_one(&self, query: &[f64]) -> (ClassLabel, f64) {
        let nn = self.nearest(query);
        let votes_nr = nn
            .iter()
            .filter(|&&i| self.labels[i] == ClassLabel::NonRumour)
            .count();
        let k = nn.len();
        let label = match (2 * votes_nr).cmp(&k) {
            Ordering::Greater => ClassLabel::NonRumour,
            Ordering::Less => ClassLabel::Rumour,
            Ordering::Equal => self.labels[nn[0]],
        };
        (label, votes_nr as f64 / k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn three_point_example() {
        let pts = Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]).unwrap();
        let m = KnnModel::fit(pts, vec![Rumour, Rumour, NonRumour], 3);
        assert_eq!(m.predict_one(&[0.1, 0.0]).0, Rumour);
        assert_eq!(m.nearest(&[0.1, 0.0]), vec![0, 1, 2]);
    }

    #[test]
    fn exact_match_with_k1() {
        let pts = Matrix::from_rows(&[[0.0], [3.0]]).unwrap();
        let m = KnnModel::fit(pts, vec![Rumour, NonRumour], 1);
        assert_eq!(m.predict_one(&[3.0]), (NonRumour, 1.0));
        assert_eq!(m.predict_one(&[0.0]), (Rumour, 0.0));
    }

    #[test]
    fn distance_tie_prefers_non_rumour() {
        let pts = Matrix::from_rows(&[[-1.0], [1.0]]).unwrap();
        let m = KnnModel::fit(pts, vec![Rumour, NonRumour], 1);
        assert_eq!(m.predict_one(&[0.0]).0, NonRumour);
    }

    #[test]
    fn vote_tie_goes_to_nearest() {
        let pts = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let m = KnnModel::fit(pts, vec![Rumour, NonRumour], 5);
        assert_eq!(m.predict_one(&[0.0]), (Rumour, 0.5));
        assert_eq!(m.predict_one(&[1.0]), (NonRumour, 0.5));
    }
}
