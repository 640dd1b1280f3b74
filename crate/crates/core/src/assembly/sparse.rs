//! Symmetric sparse storage over free degrees of freedom.

use crate::{Error, Result};
use std::io::Write;

/// Symmetric sparse matrix storing the upper triangle (`row <= col`) in
/// compressed column form; the lower triangle is implied by symmetry, so the
/// operator is exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    dim: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetric {
    /// Builds from upper-triangle triplets (`row <= col` required), summing
    /// duplicates. Triplet order does not affect the sparsity pattern; equal
    /// keys are accumulated in their input order.
    pub fn from_upper_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(r, c, v) in &triplets {
            if r > c || c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c.max(r) });
            }
            if !v.is_finite() {
                return Err(Error::Factorization(format!("non-finite entry at ({r}, {c})")));
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; dim + 1];
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((r, c));
            }
        }
        for c in 0..dim {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(SparseSymmetric { dim, col_ptr, row_idx, values })
    }

    /// Diagonal matrix.
    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        SparseSymmetric {
            dim,
            col_ptr: (0..=dim).collect(),
            row_idx: (0..dim).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    /// Builds from a dense symmetric matrix (tests and small oracles).
    pub fn from_dense(a: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let dim = a.nrows();
        let mut triplets = Vec::new();
        for c in 0..dim {
            for r in 0..=c {
                let v = a[(r, c)];
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_upper_triplets(dim, triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (upper-triangle) entry count.
    pub fn nnz_upper(&self) -> usize {
        self.values.len()
    }

    /// Raw compressed-column arrays of the stored upper triangle:
    /// `(col_ptr, row_idx, values)`.
    pub fn csc_upper(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.col_ptr, &self.row_idx, &self.values)
    }

    /// Iterates stored entries as `(row, col, value)` with `row <= col`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |c| {
            (self.col_ptr[c]..self.col_ptr[c + 1])
                .map(move |k| (self.row_idx[k], c, self.values[k]))
        })
    }

    /// `y = A x` expanding the implied lower triangle.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for c in 0..self.dim {
            let xc = x[c];
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let v = self.values[k];
                y[r] += v * xc;
                if r != c {
                    y[c] += v * x[r];
                }
            }
        }
    }

    pub fn mul_vec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec(x, &mut y);
        y
    }

    /// Quadratic form `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut q = 0.0;
        for c in 0..self.dim {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let v = self.values[k];
                if r == c {
                    q += v * x[c] * x[c];
                } else {
                    q += 2.0 * v * x[r] * x[c];
                }
            }
        }
        q
    }

    /// `alpha * self + beta * other`, merging sparsity patterns.
    pub fn linear_combination(&self, alpha: f64, other: &SparseSymmetric, beta: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut col_ptr = vec![0usize; self.dim + 1];
        let mut row_idx = Vec::with_capacity(self.values.len() + other.values.len());
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        for c in 0..self.dim {
            let (mut i, end_i) = (self.col_ptr[c], self.col_ptr[c + 1]);
            let (mut j, end_j) = (other.col_ptr[c], other.col_ptr[c + 1]);
            while i < end_i || j < end_j {
                let ri = if i < end_i { self.row_idx[i] } else { usize::MAX };
                let rj = if j < end_j { other.row_idx[j] } else { usize::MAX };
                if ri < rj {
                    row_idx.push(ri);
                    values.push(alpha * self.values[i]);
                    i += 1;
                } else if rj < ri {
                    row_idx.push(rj);
                    values.push(beta * other.values[j]);
                    j += 1;
                } else {
                    row_idx.push(ri);
                    values.push(alpha * self.values[i] + beta * other.values[j]);
                    i += 1;
                    j += 1;
                }
            }
            col_ptr[c + 1] = row_idx.len();
        }
        Ok(SparseSymmetric { dim: self.dim, col_ptr, row_idx, values })
    }

    /// Dense expansion (tests and small oracles only).
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut a = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.upper_entries() {
            a[(r, c)] = v;
            a[(c, r)] = v;
        }
        a
    }

    /// Writes the matrix in Matrix Market coordinate format (real symmetric,
    /// 1-based, lower triangle as the format prescribes).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.values.len())?;
        for (r, c, v) in self.upper_entries() {
            // Stored upper entry (r, c) mirrors to lower entry (c, r).
            writeln!(w, "{} {} {:.17e}", c + 1, r + 1, v)?;
        }
        Ok(())
    }
}
