use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::dense::DenseMatrix;
use crate::fft::{Complex, Fft};
use crate::{Error, Result};

/// Eigenvalues in `(NEGATIVE_EIGEN_TOL, 0)` are clamped to zero; anything
/// lower makes the embedding invalid.
pub const NEGATIVE_EIGEN_TOL: f64 = -1e-10;

/// Symmetric Toeplitz matrix given by its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzMatrix {
    first_row: Vec<f64>,
}

impl ToeplitzMatrix {
    pub fn new(first_row: Vec<f64>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::InvalidArgument("toeplitz first row is empty"));
        }
        Ok(Self { first_row })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.first_row[i.abs_diff(j)]
    }

    /// Direct O(N²) product.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.first_row[i.abs_diff(j)] * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| self.get(i, j))
    }
}

/// First row of a stationary squared-exponential kernel
/// `variance * exp(-(k h)² / (2 length_sq))` on a grid with spacing `h`,
/// plus `nugget` on the diagonal.
pub fn squared_exponential_row(n: usize, spacing: f64, variance: f64, length_sq: f64, nugget: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let dx = k as f64 * spacing;
            let v = variance * libm::exp(-dx * dx / (2.0 * length_sq));
            if k == 0 { v + nugget } else { v }
        })
        .collect()
}

/// Circulant matrix of size `2N - 2` whose top-left `N × N` block is a given
/// symmetric Toeplitz matrix, stored through its eigenvalues.
#[derive(Debug, Clone)]
pub struct CirculantEmbedding {
    n: usize,
    eigenvalues: Vec<f64>,
    amplitudes: Vec<f64>,
    plan: Fft,
}

impl CirculantEmbedding {
    pub fn new(toeplitz: &ToeplitzMatrix) -> Result<Self> {
        let row = toeplitz.first_row();
        let n = row.len();
        let size = if n <= 2 { n } else { 2 * n - 2 };
        let mut embedded: Vec<Complex> = row.iter().map(|&v| Complex::new(v, 0.0)).collect();
        if n > 2 {
            embedded.extend(row[1..n - 1].iter().rev().map(|&v| Complex::new(v, 0.0)));
        }
        let plan = Fft::new(size);
        let spectrum = plan.forward(&embedded);
        let mut eigenvalues = Vec::with_capacity(size);
        for (k, c) in spectrum.iter().enumerate() {
            let lambda = c.re;
            if lambda < NEGATIVE_EIGEN_TOL {
                return Err(Error::NegativeEigenvalue { index: k, value: lambda });
            }
            eigenvalues.push(lambda.max(0.0));
        }
        let amplitudes = eigenvalues.iter().map(|l| libm::sqrt(l / size as f64)).collect();
        Ok(Self { n, eigenvalues, amplitudes, plan })
    }

    /// Dimension of the embedded Toeplitz block.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Size of the circulant matrix (`2N - 2` for N > 2).
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Two independent N(0, T) draws from one complex transform.
    pub fn draw_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let xi: Vec<Complex> = self
            .amplitudes
            .iter()
            .map(|&a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(a * re, a * im)
            })
            .collect();
        let w = self.plan.forward(&xi);
        let first = w[..self.n].iter().map(|c| c.re).collect();
        let second = w[..self.n].iter().map(|c| c.im).collect();
        (first, second)
    }

    /// One N(0, T) draw: the first N entries of `Oᵀ Λ^{1/2} ε`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.draw_pair(rng).0
    }
}

/// One draw from a zero-mean Gaussian with the embedded Toeplitz covariance.
pub fn circulant_draw<R: Rng + ?Sized>(embedding: &CirculantEmbedding, rng: &mut R) -> Vec<f64> {
    embedding.draw(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn leading_eigenvalue_is_row_sum() {
        let t = ToeplitzMatrix::new(squared_exponential_row(16, 0.3, 0.6, 0.2, 0.0)).unwrap();
        let emb = CirculantEmbedding::new(&t).unwrap();
        assert_eq!(emb.size(), 30);
        let row = t.first_row();
        let sum: f64 = row.iter().sum::<f64>() + row[1..15].iter().sum::<f64>();
        assert!((emb.eigenvalues()[0] - sum).abs() < 1e-12);
    }

    #[test]
    fn identity_kernel_gives_unit_variance() {
        let mut row = alloc::vec![0.0; 64];
        row[0] = 1.0;
        let emb = CirculantEmbedding::new(&ToeplitzMatrix::new(row).unwrap()).unwrap();
        assert!(emb.eigenvalues().iter().all(|l| (l - 1.0).abs() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sum_sq = 0.0;
        let draws = 2000;
        for _ in 0..draws {
            sum_sq += emb.draw(&mut rng).iter().map(|v| v * v).sum::<f64>();
        }
        let var = sum_sq / (draws * 64) as f64;
        assert!((var - 1.0).abs() < 0.02, "var = {var}");
    }

    #[test]
    fn indefinite_row_is_rejected() {
        let t = ToeplitzMatrix::new(alloc::vec![1.0, 0.8, -0.8]).unwrap();
        assert!(matches!(CirculantEmbedding::new(&t), Err(Error::NegativeEigenvalue { .. })));
    }
}
