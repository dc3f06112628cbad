use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from `n * n` row-major values.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ A y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * dot(self.row(i), y)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    /// Checks symmetry to `tol` relative to the largest entry.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.n {
            for j in 0..i {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`, row-major, full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLower {
    n: usize,
    data: Vec<f64>,
}

impl DenseLower {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    /// Row-oriented Cholesky-Crout factorization, O(n³/3).
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.dim();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (head, tail) = data.split_at_mut(i * n);
                let row_i = &tail[..j];
                let s = if j == i {
                    a.get(i, i) - dot(row_i, row_i)
                } else {
                    a.get(i, j) - dot(row_i, &head[j * n..j * n + j])
                };
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    tail[i] = libm::sqrt(s);
                } else {
                    tail[j] = s / head[j * n + j];
                }
            }
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn row_prefix(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..i * self.n + i + 1]
    }

    /// `L x`
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row_prefix(i), &x[..=i])).collect()
    }

    /// `Lᵀ x`
    pub fn mul_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n {
            axpy(x[i], self.row_prefix(i), &mut out[..=i]);
        }
        out
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = self.row_prefix(i);
            y[i] = (b[i] - dot(&row[..i], &y[..i])) / row[i];
        }
        y
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for i in (0..self.n).rev() {
            let row = self.row_prefix(i);
            let xi = y[i] / row[i];
            y[i] = xi;
            axpy(-xi, &row[..i], &mut y[..i]);
        }
        y
    }

    /// `L Lᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, |i, j| {
            let k = i.min(j) + 1;
            dot(&self.data[i * n..i * n + k], &self.data[j * n..j * n + k])
        })
    }
}
