use alloc::vec::Vec;

use super::dense::{axpy, dot, DenseMatrix};
use crate::{Error, Result};

/// Precision matrix of the latent-variable probit representation,
///
/// ```text
/// M = [ s⁻² I_p + ZᵀZ   Zᵀ  ]
///     [ Z               I_N ]
/// ```
///
/// where `Z` is the `N × p` regressor matrix (one row per observation) and
/// `s²` the prior variance. Only `Z` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionPrecision {
    p: usize,
    n_obs: usize,
    prior_variance: f64,
    /// `N × p`, row-major
    regressors: Vec<f64>,
}

impl RegressionPrecision {
    pub fn new(regressors: &[Vec<f64>], prior_variance: f64) -> Result<Self> {
        if prior_variance.is_infinite() {
            return Err(Error::DegeneratePrior);
        }
        if !(prior_variance > 0.0) {
            return Err(Error::InvalidArgument("prior variance must be positive"));
        }
        let n_obs = regressors.len();
        let p = regressors.first().map_or(0, Vec::len);
        if p == 0 {
            return Err(Error::InvalidArgument("regression needs at least one regressor"));
        }
        let mut flat = Vec::with_capacity(n_obs * p);
        for row in regressors {
            if row.len() != p {
                return Err(Error::DimensionMismatch { expected: p, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("regressors must be finite"));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self { p, n_obs, prior_variance, regressors: flat })
    }

    pub fn dim(&self) -> usize {
        self.p + self.n_obs
    }

    pub fn n_params(&self) -> usize {
        self.p
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn prior_variance(&self) -> f64 {
        self.prior_variance
    }

    #[inline]
    fn z_row(&self, i: usize) -> &[f64] {
        &self.regressors[i * self.p..(i + 1) * self.p]
    }

    /// `Z x`, length N
    fn z_mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_obs).map(|i| dot(self.z_row(i), x)).collect()
    }

    /// `Zᵀ y`, length p
    fn zt_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.p];
        for (i, &yi) in y.iter().enumerate() {
            axpy(yi, self.z_row(i), &mut out);
        }
        out
    }

    /// `M v` in O(N p).
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let (vb, vw) = v.split_at(self.p);
        let zb = self.z_mul(vb);
        let s: Vec<f64> = zb.iter().zip(vw).map(|(a, b)| a + b).collect();
        let mut top = self.zt_mul(&s);
        for (t, b) in top.iter_mut().zip(vb) {
            *t += b / self.prior_variance;
        }
        top.extend(s);
        top
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let p = self.p;
        match (i < p, j < p) {
            (true, true) => {
                let g: f64 = (0..self.n_obs).map(|k| self.z_row(k)[i] * self.z_row(k)[j]).sum();
                if i == j { g + 1.0 / self.prior_variance } else { g }
            }
            (true, false) => self.z_row(j - p)[i],
            (false, true) => self.z_row(i - p)[j],
            (false, false) => f64::from(u8::from(i == j)),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| self.get(i, j))
    }

    /// `W z` where `W W ᵀ = M⁻¹` and `W = [[s I, 0], [-s Z, I]]`.
    pub fn color(&self, z: &[f64]) -> Vec<f64> {
        let s = libm::sqrt(self.prior_variance);
        let (zb, zw) = z.split_at(self.p);
        let xb: Vec<f64> = zb.iter().map(|v| s * v).collect();
        let proj = self.z_mul(&xb);
        let mut out = xb;
        out.extend(zw.iter().zip(&proj).map(|(w, q)| w - q));
        out
    }

    /// `W⁻¹ x`
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let s = libm::sqrt(self.prior_variance);
        let (xb, xw) = x.split_at(self.p);
        let proj = self.z_mul(xb);
        let mut out: Vec<f64> = xb.iter().map(|v| v / s).collect();
        out.extend(xw.iter().zip(&proj).map(|(w, q)| w + q));
        out
    }

    /// `Wᵀ v`
    pub fn color_transpose(&self, v: &[f64]) -> Vec<f64> {
        let s = libm::sqrt(self.prior_variance);
        let (vb, vw) = v.split_at(self.p);
        let back = self.zt_mul(vw);
        let mut out: Vec<f64> = vb.iter().zip(&back).map(|(b, q)| s * (b - q)).collect();
        out.extend_from_slice(vw);
        out
    }

    /// `W⁻ᵀ v = [v_b / s + Zᵀ v_w; v_w]`
    pub fn whiten_transpose(&self, v: &[f64]) -> Vec<f64> {
        let s = libm::sqrt(self.prior_variance);
        let (vb, vw) = v.split_at(self.p);
        let back = self.zt_mul(vw);
        let mut out: Vec<f64> = vb.iter().zip(&back).map(|(b, q)| b / s + q).collect();
        out.extend_from_slice(vw);
        out
    }
}
