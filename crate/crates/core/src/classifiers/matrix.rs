use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense row-major matrix of finite `f64` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value at row {}, column {}",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn iter_rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// `self * rhs`, where `rhs` is `cols x out` in row-major order.
    pub(crate) fn matmul_flat(&self, rhs: &[f64], out: usize) -> Matrix {
        debug_assert_eq!(rhs.len(), self.cols * out);
        let mut res = Matrix::zeros(self.rows, out);
        for r in 0..self.rows {
            let a = self.row(r);
            let dst = res.row_mut(r);
            for (k, &av) in a.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let w = &rhs[k * out..(k + 1) * out];
                for (d, &wv) in dst.iter_mut().zip(w) {
                    *d += av * wv;
                }
            }
        }
        res
    }

    /// `self^T * rhs`, flattened `cols x rhs.cols`.
    pub(crate) fn t_matmul(&self, rhs: &Matrix) -> Vec<f64> {
        debug_assert_eq!(self.rows, rhs.rows);
        let out = rhs.cols;
        let mut res = vec![0.0; self.cols * out];
        for r in 0..self.rows {
            let a = self.row(r);
            let b = rhs.row(r);
            for (k, &av) in a.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let dst = &mut res[k * out..(k + 1) * out];
                for (d, &bv) in dst.iter_mut().zip(b) {
                    *d += av * bv;
                }
            }
        }
        res
    }

    /// `self * w^T`, where `w` is `rows_w x self.cols` flattened; gives
    /// `self.rows x rows_w`.
    pub(crate) fn matmul_t_flat(&self, w: &[f64], rows_w: usize) -> Matrix {
        debug_assert_eq!(w.len(), rows_w * self.cols);
        let mut res = Matrix::zeros(self.rows, rows_w);
        for r in 0..self.rows {
            let a = self.row(r);
            let dst = res.row_mut(r);
            for (k, d) in dst.iter_mut().enumerate() {
                let wr = &w[k * self.cols..(k + 1) * self.cols];
                *d = a.iter().zip(wr).map(|(x, y)| x * y).sum();
            }
        }
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_finiteness_checked() {
        assert!(Matrix::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Matrix::new(1, 2, vec![0.0, f64::NAN]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn products() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        // w is 2x3
        let w = [1.0, 0.0, 2.0, 0.0, 1.0, -1.0];
        let p = a.matmul_flat(&w, 3);
        assert_eq!(p.data(), &[1.0, 2.0, 0.0, 3.0, 4.0, 2.0]);
        let t = a.t_matmul(&a);
        assert_eq!(t, vec![10.0, 14.0, 14.0, 20.0]);
        // w2 is 3x2, a * w2^T is 2x3
        let w2 = [1.0, 1.0, 0.0, 1.0, 2.0, 0.0];
        assert_eq!(a.matmul_t_flat(&w2, 3).data(), &[3.0, 2.0, 2.0, 7.0, 4.0, 6.0]);
    }
}
