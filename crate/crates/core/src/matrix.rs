use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("rows of unequal length");
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// `u ⊗ v`.
    pub fn rank_one(u: &[f64], v: &[f64]) -> Self {
        let data = u.iter().flat_map(|&x| v.iter().map(move |&y| x * y)).collect();
        Self {
            rows: u.len(),
            cols: v.len(),
            data,
        }
    }

    /// Zero except for `value` at `(i, j)`.
    pub fn single_entry(n: usize, i: usize, j: usize, value: f64) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = value;
        m
    }

    /// Independent standard normal entries.
    pub fn standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let data = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let data = order.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self { data, ..self.clone() }
    }

    /// Entries within each row reordered by `order`.
    pub fn permute_cols(&self, order: &[usize]) -> Self {
        let data = self.row_iter().flat_map(|r| order.iter().map(move |&j| r[j])).collect();
        Self { data, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let data = (0..self.data.len())
            .map(|k| f(k / self.cols, k % self.cols, self.data[k]))
            .collect();
        Self { data, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_constructors() {
        let r = Matrix::rank_one(&[1.0, 2.0], &[3.0, 4.0, 5.0]);
        assert_eq!((r.rows(), r.cols()), (2, 3));
        assert_eq!(r.row(1), &[6.0, 8.0, 10.0]);
        assert_eq!(Matrix::identity(3).get(2, 2), 1.0);
        assert_eq!(Matrix::single_entry(2, 1, 0, 7.0).entries(), &[0.0, 0.0, 7.0, 0.0]);
    }

    #[test]
    fn permutations() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.permute_rows(&[1, 0]).row(0), &[3.0, 4.0]);
        assert_eq!(m.permute_cols(&[1, 0]).row(1), &[4.0, 3.0]);
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
