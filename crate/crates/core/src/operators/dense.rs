use num_complex::Complex64;

use super::{check_len, LinearOperator};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Explicit `rows x cols` matrix stored row-major. Used as the reference
/// operator in tests and for small user-supplied matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(
                "shape",
                format!("{rows}x{cols} has a zero dimension"),
            ));
        }
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![T::one(); n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        let mut data = vec![T::zero(); n * n];
        for (i, &d) in entries.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `A^H A` as an explicit `cols x cols` matrix.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..self.rows {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                data[i * n + j] = acc;
            }
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }
}

impl DenseOperator<f64> {
    /// Parse a real matrix from CSV text: one row per line, comma separated.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let rows = crate::csvio::parse_matrix_csv(text)?;
        Self::from_rows(&rows)
    }

    pub fn to_complex(&self) -> DenseOperator<Complex64> {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }
}

impl<T: Scalar> LinearOperator<T> for DenseOperator<T> {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn codomain_dim(&self) -> usize {
        self.rows
    }

    fn forward_into(&self, x: &[T], out: &mut [T]) {
        for (row, o) in self.data.chunks_exact(self.cols).zip(out.iter_mut()) {
            *o = row
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    fn adjoint_into(&self, y: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (row, &yi) in self.data.chunks_exact(self.cols).zip(y) {
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a.conj() * yi;
            }
        }
    }
}
