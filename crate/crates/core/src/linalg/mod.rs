//! Gaussian specifications and structured factorizations.
//!
//! Every factorization exposes the same whitening map `W` with
//! `W Wᵀ = Σ` (the covariance). Unwhitening is `x = W z + μ`, whitening is
//! `z = W⁻¹ (x - μ)`. For a precision-form matrix `M = L Lᵀ` this is
//! `W = L⁻ᵀ`; for a covariance-form matrix `Σ = L Lᵀ` it is `W = L`.

mod banded;
mod dense;
mod regression;
mod toeplitz;

use alloc::boxed::Box;
use alloc::vec::Vec;

use once_cell::race::OnceBox;
use rand::Rng;
use rand_distr::StandardNormal;

pub use banded::{BandedLower, BandedMatrix};
pub(crate) use dense::dot;
pub use dense::{DenseLower, DenseMatrix};
pub use regression::RegressionPrecision;
pub use toeplitz::{circulant_draw, squared_exponential_row, CirculantEmbedding, ToeplitzMatrix, NEGATIVE_EIGEN_TOL};

use crate::{Error, Result};

/// Relative tolerance for the symmetry check of dense input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Which matrix the spec stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `M` with `log p = -1/2 xᵀ M x + rᵀ x`
    Precision,
    /// `Σ = M⁻¹` together with the mean
    Covariance,
}

/// Structure tag of a [`StructuredMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Dense,
    Banded { bandwidth: usize },
    Toeplitz,
    Regression,
}

/// Symmetric positive-definite matrix with a structure tag.
#[derive(Debug, Clone, PartialEq)]
pub enum StructuredMatrix {
    Dense(DenseMatrix),
    Banded(BandedMatrix),
    Toeplitz(ToeplitzMatrix),
    /// Probit latent-variable precision, see [`RegressionPrecision`].
    Regression(RegressionPrecision),
}

impl StructuredMatrix {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.dim(),
            Self::Banded(m) => m.dim(),
            Self::Toeplitz(m) => m.dim(),
            Self::Regression(m) => m.dim(),
        }
    }

    pub fn structure(&self) -> Structure {
        match self {
            Self::Dense(_) => Structure::Dense,
            Self::Banded(m) => Structure::Banded { bandwidth: m.bandwidth() },
            Self::Toeplitz(_) => Structure::Toeplitz,
            Self::Regression(_) => Structure::Regression,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(m) => m.mul_vec(x),
            Self::Banded(m) => m.mul_vec(x),
            Self::Toeplitz(m) => m.mul_vec(x),
            Self::Regression(m) => m.mul_vec(x),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Banded(m) => m.to_dense(),
            Self::Toeplitz(m) => m.to_dense(),
            Self::Regression(m) => m.to_dense(),
        }
    }
}

#[derive(Debug)]
enum FactorKind {
    Dense(DenseLower),
    Banded(BandedLower),
    Toeplitz {
        embedding: CirculantEmbedding,
        matrix: ToeplitzMatrix,
        /// Dense Cholesky factor, computed the first time whitening needs it.
        dense: OnceBox<Result<DenseLower>>,
    },
    Regression(RegressionPrecision),
}

/// Structured Cholesky factorization of a [`GaussianSpec`] matrix.
///
/// Immutable after construction; the lazily computed dense factor of a
/// Toeplitz matrix is initialized race-free, so the type is `Sync`.
#[derive(Debug)]
pub struct CholeskyFactor {
    form: Form,
    kind: FactorKind,
}

impl Clone for CholeskyFactor {
    fn clone(&self) -> Self {
        let kind = match &self.kind {
            FactorKind::Dense(l) => FactorKind::Dense(l.clone()),
            FactorKind::Banded(l) => FactorKind::Banded(l.clone()),
            FactorKind::Toeplitz { embedding, matrix, dense } => {
                let copy = OnceBox::new();
                if let Some(v) = dense.get() {
                    let _ = copy.set(Box::new(v.clone()));
                }
                FactorKind::Toeplitz { embedding: embedding.clone(), matrix: matrix.clone(), dense: copy }
            }
            FactorKind::Regression(r) => FactorKind::Regression(r.clone()),
        };
        Self { form: self.form, kind }
    }
}

/// Lower-triangular factor with either storage, borrowed.
enum Lower<'a> {
    Dense(&'a DenseLower),
    Banded(&'a BandedLower),
}

impl Lower<'_> {
    fn mul(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Lower::Dense(l) => l.mul(x),
            Lower::Banded(l) => l.mul(x),
        }
    }
    fn mul_transpose(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Lower::Dense(l) => l.mul_transpose(x),
            Lower::Banded(l) => l.mul_transpose(x),
        }
    }
    fn solve_lower(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Lower::Dense(l) => l.solve_lower(x),
            Lower::Banded(l) => l.solve_lower(x),
        }
    }
    fn solve_upper(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Lower::Dense(l) => l.solve_upper(x),
            Lower::Banded(l) => l.solve_upper(x),
        }
    }
}

impl CholeskyFactor {
    /// Factorizes `matrix` interpreted according to `form`.
    ///
    /// Dense input costs O(d³), banded input O(d k²). A Toeplitz input only
    /// builds its circulant embedding here (O(N log N)); the dense factor used
    /// for whitening is computed on first use.
    pub fn new(form: Form, matrix: &StructuredMatrix) -> Result<Self> {
        let kind = match matrix {
            StructuredMatrix::Dense(m) => FactorKind::Dense(DenseLower::factor(m)?),
            StructuredMatrix::Banded(m) => FactorKind::Banded(BandedLower::factor(m)?),
            StructuredMatrix::Toeplitz(m) => FactorKind::Toeplitz {
                embedding: CirculantEmbedding::new(m)?,
                matrix: m.clone(),
                dense: OnceBox::new(),
            },
            StructuredMatrix::Regression(m) => {
                if form != Form::Precision {
                    return Err(Error::InvalidArgument("regression structure is a precision matrix"));
                }
                FactorKind::Regression(m.clone())
            }
        };
        Ok(Self { form, kind })
    }

    /// Identity factor of dimension `d`.
    pub fn identity(d: usize) -> Self {
        Self { form: Form::Covariance, kind: FactorKind::Dense(DenseLower::identity(d)) }
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FactorKind::Dense(l) => l.dim(),
            FactorKind::Banded(l) => l.dim(),
            FactorKind::Toeplitz { matrix, .. } => matrix.dim(),
            FactorKind::Regression(r) => r.dim(),
        }
    }

    pub fn structure(&self) -> Structure {
        match &self.kind {
            FactorKind::Dense(_) => Structure::Dense,
            FactorKind::Banded(l) => Structure::Banded { bandwidth: l.bandwidth() },
            FactorKind::Toeplitz { .. } => Structure::Toeplitz,
            FactorKind::Regression(_) => Structure::Regression,
        }
    }

    /// Circulant embedding, for Toeplitz factors.
    pub fn embedding(&self) -> Option<&CirculantEmbedding> {
        match &self.kind {
            FactorKind::Toeplitz { embedding, .. } => Some(embedding),
            _ => None,
        }
    }

    fn lower(&self) -> Result<Option<Lower<'_>>> {
        Ok(match &self.kind {
            FactorKind::Dense(l) => Some(Lower::Dense(l)),
            FactorKind::Banded(l) => Some(Lower::Banded(l)),
            FactorKind::Toeplitz { matrix, dense, .. } => {
                let l = dense.get_or_init(|| Box::new(DenseLower::factor(&matrix.to_dense())));
                Some(Lower::Dense(l.as_ref().map_err(Clone::clone)?))
            }
            FactorKind::Regression(_) => None,
        })
    }

    /// Forces the dense factor of a Toeplitz matrix (no-op otherwise), so
    /// positive-definiteness failures surface early.
    pub fn ensure_dense(&self) -> Result<()> {
        self.lower().map(|_| ())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// `W z`
    pub fn unwhiten(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check(z)?;
        Ok(match (self.lower()?, self.form) {
            (Some(l), Form::Precision) => l.solve_upper(z),
            (Some(l), Form::Covariance) => l.mul(z),
            (None, _) => self.regression().color(z),
        })
    }

    /// `W⁻¹ x`
    pub fn whiten(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(match (self.lower()?, self.form) {
            (Some(l), Form::Precision) => l.mul_transpose(x),
            (Some(l), Form::Covariance) => l.solve_lower(x),
            (None, _) => self.regression().whiten(x),
        })
    }

    /// `Wᵀ v`; maps a constraint normal from original to whitened coordinates.
    pub fn unwhiten_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        Ok(match (self.lower()?, self.form) {
            (Some(l), Form::Precision) => l.solve_lower(v),
            (Some(l), Form::Covariance) => l.mul_transpose(v),
            (None, _) => self.regression().color_transpose(v),
        })
    }

    /// `W⁻ᵀ v`
    pub fn whiten_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        Ok(match (self.lower()?, self.form) {
            (Some(l), Form::Precision) => l.mul(v),
            (Some(l), Form::Covariance) => l.solve_upper(v),
            (None, _) => self.regression().whiten_transpose(v),
        })
    }

    /// `W Wᵀ v = Σ v`
    pub fn covariance_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.unwhiten(&self.unwhiten_transpose(v)?)
    }

    /// `W⁻ᵀ W⁻¹ v = M v`
    pub fn precision_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.whiten_transpose(&self.whiten(v)?)
    }

    /// `W ε` with `ε ~ N(0, I)`: a zero-mean draw with covariance `Σ`.
    /// Covariance-form Toeplitz factors use the circulant embedding.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if let (FactorKind::Toeplitz { embedding, .. }, Form::Covariance) = (&self.kind, self.form) {
            return Ok(embedding.draw(rng));
        }
        let eps: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
        self.unwhiten(&eps)
    }

    /// Like [`draw`](Self::draw), but circulant-backed factors also return the
    /// independent second draw that the same transform produces.
    pub fn draw_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        if let (FactorKind::Toeplitz { embedding, .. }, Form::Covariance) = (&self.kind, self.form) {
            let (a, b) = embedding.draw_pair(rng);
            return Ok((a, Some(b)));
        }
        Ok((self.draw(rng)?, None))
    }

    fn regression(&self) -> &RegressionPrecision {
        match &self.kind {
            FactorKind::Regression(r) => r,
            _ => unreachable!("not a regression factor"),
        }
    }

    /// Dense lower factor `L` (`L Lᵀ` is the factored matrix); `None` for the
    /// regression block form, which has no stored triangular factor.
    pub fn lower_dense(&self) -> Result<Option<DenseMatrix>> {
        Ok(match self.lower()? {
            Some(Lower::Dense(l)) => Some(DenseMatrix::from_fn(l.dim(), |i, j| if j <= i { l.get(i, j) } else { 0.0 })),
            Some(Lower::Banded(l)) => Some(l.to_dense()),
            None => None,
        })
    }

    /// Reconstructs the factored matrix (`M` for precision form, `Σ` for
    /// covariance form) densely. O(d³); meant for checks.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        let d = self.dim();
        let mut out = DenseMatrix::zeros(d);
        for j in 0..d {
            let mut e = alloc::vec![0.0; d];
            e[j] = 1.0;
            let col = match self.form {
                Form::Precision => self.precision_mul(&e)?,
                Form::Covariance => self.covariance_mul(&e)?,
            };
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

/// Factorizes the matrix of a spec (the spec already caches one; this
/// recomputes it).
pub fn factorize(spec: &GaussianSpec) -> Result<CholeskyFactor> {
    CholeskyFactor::new(spec.form, &spec.matrix)
}

/// `W⁻¹ x` (no mean shift).
pub fn whiten(factor: &CholeskyFactor, x: &[f64]) -> Result<Vec<f64>> {
    factor.whiten(x)
}

/// `W z` (no mean shift).
pub fn unwhiten(factor: &CholeskyFactor, z: &[f64]) -> Result<Vec<f64>> {
    factor.unwhiten(z)
}

/// One draw from the untruncated Gaussian of `spec`.
pub fn sample_gaussian<R: Rng + ?Sized>(spec: &GaussianSpec, rng: &mut R) -> Result<Vec<f64>> {
    spec.sample(rng)
}

/// The untruncated Gaussian: matrix, linear term, mean and cached factor.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    form: Form,
    matrix: StructuredMatrix,
    linear_term: Vec<f64>,
    mean: Vec<f64>,
    factor: CholeskyFactor,
}

impl GaussianSpec {
    /// `linear_term` is `r` in precision form and the mean `μ` in covariance form.
    pub fn new(form: Form, matrix: StructuredMatrix, linear_term: Vec<f64>) -> Result<Self> {
        let d = matrix.dim();
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive"));
        }
        if linear_term.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: linear_term.len() });
        }
        if linear_term.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("linear term must be finite"));
        }
        if let StructuredMatrix::Dense(m) = &matrix {
            if m.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("matrix entries must be finite"));
            }
            m.check_symmetric(SYMMETRY_TOL)?;
        }
        let factor = CholeskyFactor::new(form, &matrix)?;
        let mean = match form {
            Form::Covariance => linear_term.clone(),
            Form::Precision => factor.covariance_mul(&linear_term)?,
        };
        Ok(Self { form, matrix, linear_term, mean, factor })
    }

    pub fn precision(matrix: StructuredMatrix, r: Vec<f64>) -> Result<Self> {
        Self::new(Form::Precision, matrix, r)
    }

    pub fn covariance(matrix: StructuredMatrix, mean: Vec<f64>) -> Result<Self> {
        Self::new(Form::Covariance, matrix, mean)
    }

    /// `N(0, I_d)`
    pub fn standard(d: usize) -> Result<Self> {
        Self::new(
            Form::Covariance,
            StructuredMatrix::Banded(BandedMatrix::diagonal(alloc::vec![1.0; d])),
            alloc::vec![0.0; d],
        )
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn matrix(&self) -> &StructuredMatrix {
        &self.matrix
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.linear_term
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    /// `W⁻¹ (x - μ)`
    pub fn whiten(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.factor.check(x)?;
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        self.factor.whiten(&centered)
    }

    /// `W z + μ`
    pub fn unwhiten(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.factor.unwhiten(z)?;
        for (xi, m) in x.iter_mut().zip(&self.mean) {
            *xi += m;
        }
        Ok(x)
    }

    /// `Σ v`, using the stored matrix directly in covariance form.
    pub fn covariance_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.factor.check(v)?;
        match self.form {
            Form::Covariance => Ok(self.matrix.mul_vec(v)),
            Form::Precision => self.factor.covariance_mul(v),
        }
    }

    /// `M v`, using the stored matrix directly in precision form.
    pub fn precision_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.factor.check(v)?;
        match self.form {
            Form::Precision => Ok(self.matrix.mul_vec(v)),
            Form::Covariance => self.factor.precision_mul(v),
        }
    }

    /// `vᵀ M v = |W⁻¹ v|²`
    pub fn precision_norm_sq(&self, v: &[f64]) -> Result<f64> {
        let z = self.factor.whiten(v)?;
        Ok(dot(&z, &z))
    }

    /// Zero-mean draw with covariance `Σ`.
    pub fn draw_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        self.factor.draw(rng)
    }

    /// Zero-mean draw, plus a second independent one when the factor yields
    /// two for the price of one.
    pub fn draw_centered_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        self.factor.draw_pair(rng)
    }

    /// Draw from `N(μ, Σ)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut x = self.draw_centered(rng)?;
        for (xi, m) in x.iter_mut().zip(&self.mean) {
            *xi += m;
        }
        Ok(x)
    }

    /// Untruncated log-density up to a constant.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        let c: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        Ok(-0.5 * self.precision_norm_sq(&c)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bridge_precision(n: usize) -> StructuredMatrix {
        StructuredMatrix::Banded(BandedMatrix::tridiagonal(n, 2.0, -1.0))
    }

    #[test]
    fn identity_whitening_is_identity() {
        let f = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Dense(DenseMatrix::identity(2))).unwrap();
        assert_eq!(whiten(&f, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(unwhiten(&f, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn whiten_round_trip_on_tridiagonal() {
        let spec = GaussianSpec::precision(bridge_precision(3), vec![1.0, 0.0, -2.0]).unwrap();
        let x = [0.4, -1.3, 2.2];
        let back = spec.unwhiten(&spec.whiten(&x).unwrap()).unwrap();
        for i in 0..3 {
            assert!((back[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn bidiagonal_apply_matches_dense_solve() {
        // T = 4 steps, sigma = 1: 3 x 3 tridiagonal precision
        let banded = CholeskyFactor::new(Form::Precision, &bridge_precision(3)).unwrap();
        let dense = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Dense(BandedMatrix::tridiagonal(3, 2.0, -1.0).to_dense())).unwrap();
        let z = [0.5, -0.25, 1.5];
        let a = banded.unwhiten(&z).unwrap();
        let b = dense.unwhiten(&z).unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
        let l = banded.lower_dense().unwrap().unwrap();
        assert_eq!(l.get(2, 0), 0.0);
    }

    #[test]
    fn precision_mean_solves_linear_term() {
        let m = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let spec = GaussianSpec::precision(StructuredMatrix::Dense(m.clone()), vec![1.0, 1.0]).unwrap();
        let back = m.mul_vec(spec.mean());
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruct_is_identity_on_matrix() {
        let m = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let f = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Dense(m.clone())).unwrap();
        let r = f.reconstruct().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.get(i, j) - m.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = CholeskyFactor::identity(2);
        assert_eq!(f.whiten(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn unit_gaussian_sample_mean() {
        let spec = GaussianSpec::standard(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| spec.sample(&mut rng).unwrap()[0]).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / libm::sqrt(n as f64));
    }

    #[test]
    fn toeplitz_whitening_uses_lazy_dense_factor() {
        let row = squared_exponential_row(8, 0.5, 1.0, 0.5, 1e-6);
        let spec = GaussianSpec::covariance(StructuredMatrix::Toeplitz(ToeplitzMatrix::new(row).unwrap()), vec![0.0; 8]).unwrap();
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.1).collect();
        let back = spec.unwhiten(&spec.whiten(&x).unwrap()).unwrap();
        for i in 0..8 {
            assert!((back[i] - x[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn regression_whiten_transpose_matches_dense() {
        let r = RegressionPrecision::new(&[vec![1.0, 2.0], vec![1.0, -1.0]], 1.5).unwrap();
        let f = CholeskyFactor::new(Form::Precision, &StructuredMatrix::Regression(r.clone())).unwrap();
        let v = [0.3, -0.2, 0.9, 1.4];
        let mv = f.precision_mul(&v).unwrap();
        let direct = r.mul_vec(&v);
        for i in 0..4 {
            assert!((mv[i] - direct[i]).abs() < 1e-12);
        }
    }
}
