use alloc::vec;
use alloc::vec::Vec;

use super::{DenseMatrix, LinearOperator};
use crate::error::{Error, Result};

/// Compressed sparse row storage with sorted, duplicate-free rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_starts: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every structural invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_starts: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be positive"));
        }
        if row_starts.len() != nrows + 1 {
            return Err(Error::InvalidMatrix("row_starts must have nrows + 1 entries"));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidMatrix("col_indices and values differ in length"));
        }
        if row_starts[0] != 0 || row_starts[nrows] != values.len() {
            return Err(Error::InvalidMatrix("row_starts must span 0..nnz"));
        }
        for w in row_starts.windows(2) {
            if w[0] > w[1] {
                return Err(Error::InvalidMatrix("row_starts must be nondecreasing"));
            }
            let cols = &col_indices[w[0]..w[1]];
            if cols.windows(2).any(|c| c[0] >= c[1]) {
                return Err(Error::InvalidMatrix("column indices must increase within a row"));
            }
            if cols.last().is_some_and(|&c| c >= ncols) {
                return Err(Error::InvalidMatrix("column index out of bounds"));
            }
        }
        Ok(Self { nrows, ncols, row_starts, col_indices, values })
    }

    /// Builds a matrix from 0-based `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be positive"));
        }
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        if entries.iter().any(|&(i, j, _)| i >= nrows || j >= ncols) {
            return Err(Error::InvalidMatrix("triplet index out of bounds"));
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut row_starts = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_starts[i + 1] += 1;
            col_indices.push(j);
            values.push(v);
            last = Some((i, j));
        }
        for i in 0..nrows {
            row_starts[i + 1] += row_starts[i];
        }
        Self::new(nrows, ncols, row_starts, col_indices, values)
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut trip = Vec::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = a.get(i, j);
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(a.nrows(), a.ncols(), trip).expect("dense matrix has valid shape")
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_starts(&self) -> &[usize] {
        &self.row_starts
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Stored entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_starts[i]..self.row_starts[i + 1];
        self.col_indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// Iterates all stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Value at `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_starts[i]..self.row_starts[i + 1];
        match self.col_indices[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, v)| (j, i, v)))
            .expect("transpose of a valid matrix is valid")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d.set(i, j, v);
        }
        d
    }

    /// 2-norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut scale = vec![0.0_f64; self.ncols];
        for (&j, &v) in self.col_indices.iter().zip(&self.values) {
            scale[j] = scale[j].max(v.abs());
        }
        let mut ssq = vec![0.0_f64; self.ncols];
        for (&j, &v) in self.col_indices.iter().zip(&self.values) {
            if scale[j] > 0.0 {
                let t = v / scale[j];
                ssq[j] += t * t;
            }
        }
        scale
            .iter()
            .zip(&ssq)
            .map(|(s, q)| s * crate::math::sqrt(*q))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::vecops::norm2(&self.values)
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn forward_acc(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_starts[i]..self.row_starts[i + 1];
            let s: f64 = self.col_indices[r.clone()]
                .iter()
                .zip(&self.values[r])
                .map(|(&j, &v)| v * x[j])
                .sum();
            *yi += s;
        }
    }

    fn adjoint_acc(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> CsrMatrix {
        CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap()
    }

    #[test]
    fn hand_products() {
        let a = two_by_two();
        assert_eq!(a.apply(&[1.0, 1.0]).unwrap(), [3.0, 3.0]);
        assert_eq!(a.apply_adjoint(&[1.0, 1.0]).unwrap(), [1.0, 5.0]);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 0], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn transpose_and_dense_agree() {
        let a = two_by_two();
        let t = a.transpose();
        assert_eq!(t.get(1, 0), 2.0);
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(a.to_dense(), DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 3.0]]));
    }

    #[test]
    fn column_norms_match_hand_values() {
        let a = two_by_two();
        let n = a.column_norms();
        assert_eq!(n[0], 1.0);
        assert!((n[1] - 13.0_f64.sqrt()).abs() < 1e-15);
    }
}
