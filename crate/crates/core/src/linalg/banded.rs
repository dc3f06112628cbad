use alloc::vec;
use alloc::vec::Vec;

use super::dense::DenseMatrix;
use crate::{Error, Result};

/// Symmetric banded matrix in diagonal-major storage.
///
/// `diagonals[d][j]` holds `A[j + d][j]` for `d = 0..=bandwidth`; a
/// tridiagonal matrix has bandwidth 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bandwidth: usize,
    diagonals: Vec<Vec<f64>>,
}

impl BandedMatrix {
    /// `diagonals[0]` is the main diagonal (length n), `diagonals[d]` the
    /// d-th subdiagonal (length n - d).
    pub fn from_diagonals(diagonals: Vec<Vec<f64>>) -> Result<Self> {
        let n = diagonals.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidArgument("banded matrix needs a nonempty main diagonal"));
        }
        for (d, diag) in diagonals.iter().enumerate() {
            if diag.len() != n.saturating_sub(d) {
                return Err(Error::DimensionMismatch { expected: n.saturating_sub(d), got: diag.len() });
            }
        }
        Ok(Self { n, bandwidth: diagonals.len() - 1, diagonals })
    }

    /// Symmetric tridiagonal matrix with constant diagonal and off-diagonal.
    pub fn tridiagonal(n: usize, diag: f64, off: f64) -> Self {
        let mut diagonals = vec![vec![diag; n]];
        if n > 1 {
            diagonals.push(vec![off; n - 1]);
        } else {
            diagonals.push(Vec::new());
        }
        Self { n, bandwidth: 1, diagonals }
    }

    pub fn diagonal(values: Vec<f64>) -> Self {
        Self { n: values.len(), bandwidth: 0, diagonals: vec![values] }
    }

    /// Extracts the band of a dense matrix; entries beyond the band must be
    /// exactly zero.
    pub fn from_dense(m: &DenseMatrix, bandwidth: usize) -> Result<Self> {
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > bandwidth && m.get(i, j) != 0.0 {
                    return Err(Error::OutsideBand { bandwidth, row: i, col: j });
                }
            }
        }
        let diagonals = (0..=bandwidth)
            .map(|d| (0..n.saturating_sub(d)).map(|j| m.get(j + d, j)).collect())
            .collect();
        Ok(Self { n, bandwidth, diagonals })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn diagonals(&self) -> &[Vec<f64>] {
        &self.diagonals
    }

    /// Entry `(i, j)`; zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bandwidth {
            0.0
        } else {
            self.diagonals[d][lo]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diagonals[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for d in 1..=self.bandwidth {
            for (j, a) in self.diagonals[d].iter().enumerate() {
                out[j + d] += a * x[j];
                out[j] += a * x[j + d];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j))
    }
}

/// Lower-triangular banded Cholesky factor `L` with `A = L Lᵀ`, same storage
/// convention as [`BandedMatrix`]. For a tridiagonal input L is bidiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLower {
    n: usize,
    bandwidth: usize,
    diagonals: Vec<Vec<f64>>,
}

impl BandedLower {
    /// O(n k²) factorization.
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        let (n, k) = (a.dim(), a.bandwidth());
        let mut diagonals: Vec<Vec<f64>> = (0..=k).map(|d| vec![0.0; n.saturating_sub(d)]).collect();
        for i in 0..n {
            let start = i.saturating_sub(k);
            for j in start..=i {
                let mut s = a.get(i, j);
                for l in start..j {
                    s -= diagonals[i - l][l] * diagonals[j - l][l];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    diagonals[0][i] = libm::sqrt(s);
                } else {
                    diagonals[i - j][j] = s / diagonals[0][j];
                }
            }
        }
        Ok(Self { n, bandwidth: k, diagonals })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)` of L (zero above the diagonal or outside the band).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bandwidth {
            0.0
        } else {
            self.diagonals[i - j][j]
        }
    }

    /// `L x`
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diagonals[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for d in 1..=self.bandwidth {
            for (j, a) in self.diagonals[d].iter().enumerate() {
                out[j + d] += a * x[j];
            }
        }
        out
    }

    /// `Lᵀ x`
    pub fn mul_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diagonals[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for d in 1..=self.bandwidth {
            for (j, a) in self.diagonals[d].iter().enumerate() {
                out[j] += a * x[j + d];
            }
        }
        out
    }

    /// Solves `L y = b` in O(n k).
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut s = b[i];
            for d in 1..=self.bandwidth.min(i) {
                s -= self.diagonals[d][i - d] * y[i - d];
            }
            y[i] = s / self.diagonals[0][i];
        }
        y
    }

    /// Solves `Lᵀ x = b` in O(n k).
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for d in 1..=self.bandwidth.min(n - 1 - i) {
                s -= self.diagonals[d][i] * x[i + d];
            }
            x[i] = s / self.diagonals[0][i];
        }
        x
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::DenseLower;

    fn random_walk_precision(n: usize) -> BandedMatrix {
        BandedMatrix::tridiagonal(n, 2.0, -1.0)
    }

    #[test]
    fn tridiagonal_factor_is_bidiagonal_and_reconstructs() {
        let m = random_walk_precision(3);
        let l = BandedLower::factor(&m).unwrap();
        assert_eq!(l.bandwidth(), 1);
        assert_eq!(l.get(2, 0), 0.0);
        let dense = l.to_dense();
        let recon = DenseMatrix::from_fn(3, |i, j| (0..3).map(|k| dense.get(i, k) * dense.get(j, k)).sum());
        for i in 0..3 {
            for j in 0..3 {
                assert!((recon.get(i, j) - m.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn banded_and_dense_paths_agree() {
        let n = 12;
        let m = BandedMatrix::from_diagonals(vec![
            (0..n).map(|i| 5.0 + 0.1 * i as f64).collect(),
            (0..n - 1).map(|i| -1.0 + 0.05 * i as f64).collect(),
            (0..n - 2).map(|i| 0.3 - 0.01 * i as f64).collect(),
        ])
        .unwrap();
        let banded = BandedLower::factor(&m).unwrap();
        let dense = DenseLower::factor(&m.to_dense()).unwrap();
        for i in 0..n {
            for j in 0..=i {
                assert!((banded.get(i, j) - dense.get(i, j)).abs() < 1e-10);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let a = banded.solve_upper(&banded.solve_lower(&x));
        let b = dense.solve_upper(&dense.solve_lower(&x));
        let c = banded.mul(&banded.mul_transpose(&x));
        let d = m.mul_vec(&x);
        for i in 0..n {
            assert!((a[i] - b[i]).abs() < 1e-12);
            assert!((c[i] - d[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn nonzero_outside_band_is_rejected() {
        let mut d = DenseMatrix::identity(3);
        d.set(0, 2, 1e-30);
        d.set(2, 0, 1e-30);
        assert!(matches!(BandedMatrix::from_dense(&d, 1), Err(Error::OutsideBand { .. })));
    }
}
