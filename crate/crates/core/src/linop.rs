//! Linear system data model: dense storage and the matrix-free row oracle.
//!
//! The solver sees the system only through [`RowOracle`]. Rows are indexed
//! from zero.

use crate::error::{Error, Result};
use crate::flops::{counted_action, FlopCounter};
use crate::scalar::{norm_inf, Scalar};

/// Row-major dense `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![S::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = S::one();
        }
        Self::from_row_major(n, n, data).expect("identity dimensions")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `A x`, uncounted.
    pub fn mul_vec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut scratch = FlopCounter::new();
        Ok((0..self.rows)
            .map(|i| counted_action(self.row(i), x, &mut scratch))
            .collect())
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.magnitude()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs<S>(pub Vec<S>);

impl<S: Scalar> Rhs<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.0)
    }
}

impl<S> From<Vec<S>> for Rhs<S> {
    fn from(v: Vec<S>) -> Self {
        Rhs(v)
    }
}

/// Access to a linear system through row actions `v -> a_k^T v` and
/// right-hand entries `b_k`.
///
/// Implementations must be read-only: the solver calls `row_action`
/// concurrently from many threads. Any flops spent inside `row_action`
/// should be tallied on `counter`.
pub trait RowOracle<S: Scalar>: Sync {
    fn rows(&self) -> usize;
    fn dim(&self) -> usize;
    fn row_action(&self, k: usize, v: &[S], counter: &mut FlopCounter) -> S;
    fn rhs_entry(&self, k: usize) -> S;

    fn rhs_norm_inf(&self) -> f64 {
        (0..self.rows())
            .map(|k| self.rhs_entry(k).magnitude())
            .fold(0.0, f64::max)
    }

    /// `|a_k^T x - b_k|` for every row, uncounted.
    fn row_residuals(&self, x: &[S]) -> Vec<f64> {
        let mut scratch = FlopCounter::new();
        (0..self.rows())
            .map(|k| (self.row_action(k, x, &mut scratch) - self.rhs_entry(k)).magnitude())
            .collect()
    }
}

/// Row oracle backed by a dense matrix and right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct DenseOracle<'a, S> {
    matrix: &'a DenseMatrix<S>,
    rhs: &'a Rhs<S>,
}

impl<'a, S: Scalar> DenseOracle<'a, S> {
    pub fn matrix(&self) -> &'a DenseMatrix<S> {
        self.matrix
    }

    pub fn rhs(&self) -> &'a Rhs<S> {
        self.rhs
    }
}

impl<S: Scalar> RowOracle<S> for DenseOracle<'_, S> {
    fn rows(&self) -> usize {
        self.matrix.rows
    }

    fn dim(&self) -> usize {
        self.matrix.cols
    }

    #[inline]
    fn row_action(&self, k: usize, v: &[S], counter: &mut FlopCounter) -> S {
        counted_action(self.matrix.row(k), v, counter)
    }

    #[inline]
    fn rhs_entry(&self, k: usize) -> S {
        self.rhs.0[k]
    }
}

pub fn oracle_from_dense<'a, S: Scalar>(
    matrix: &'a DenseMatrix<S>,
    rhs: &'a Rhs<S>,
) -> Result<DenseOracle<'a, S>> {
    if matrix.rows() != rhs.len() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but right-hand side has {} entries",
            matrix.rows(),
            rhs.len()
        )));
    }
    Ok(DenseOracle { matrix, rhs })
}

/// `max_k |a_k^T x - b_k|`.
pub fn residual_inf<S: Scalar>(matrix: &DenseMatrix<S>, rhs: &Rhs<S>, x: &[S]) -> Result<f64> {
    let oracle = oracle_from_dense(matrix, rhs)?;
    if x.len() != matrix.cols() {
        return Err(Error::Dimension(format!(
            "solution has {} entries but matrix has {} columns",
            x.len(),
            matrix.cols()
        )));
    }
    Ok(oracle.row_residuals(x).into_iter().fold(0.0, f64::max))
}
