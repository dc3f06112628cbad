//! Builders for the worked examples: probit regression, Brownian bridge,
//! quantized stationary GP, and two-dimensional toy truncations.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constraints::{Constraint, LinearConstraint};
use crate::engine::{Frame, TmgModel};
use crate::linalg::{
    squared_exponential_row, BandedMatrix, CirculantEmbedding, DenseMatrix, GaussianSpec, RegressionPrecision,
    StructuredMatrix, ToeplitzMatrix,
};
use crate::{Error, Result};

/// A model with its starting point.
#[derive(Debug, Clone)]
pub struct Preset {
    pub model: TmgModel,
    pub init: Vec<f64>,
}

/// Standard normal around `(4, 4)` restricted to `x ≤ y ≤ 1.1 x`,
/// `x, y ≥ 0`, started at `(2, 2.1)`.
pub fn wedge() -> Result<Preset> {
    let gaussian = GaussianSpec::covariance(StructuredMatrix::Dense(DenseMatrix::identity(2)), alloc::vec![4.0, 4.0])?;
    let constraints = alloc::vec![
        Constraint::linear(alloc::vec![-1.0, 1.0], 0.0)?,
        Constraint::linear(alloc::vec![1.1, -1.0], 0.0)?,
        Constraint::linear(alloc::vec![1.0, 0.0], 0.0)?,
        Constraint::linear(alloc::vec![0.0, 1.0], 0.0)?,
    ];
    Ok(Preset { model: TmgModel::new(gaussian, constraints, Frame::Canonical)?, init: alloc::vec![2.0, 2.1] })
}

/// Canonical 2-d normal inside the ellipse `(x-4)²/32 + (y-1)²/8 ≤ 1` and
/// outside `4x² + 8y² - 2xy + 5y < 1`, started at `(2, 0)`.
pub fn ellipses() -> Result<Preset> {
    let gaussian = GaussianSpec::standard(2)?;
    let inside = Constraint::quadratic(
        DenseMatrix::from_rows(&[alloc::vec![-1.0 / 32.0, 0.0], alloc::vec![0.0, -1.0 / 8.0]])?,
        alloc::vec![0.25, 0.25],
        0.375,
    )?;
    let outside = Constraint::quadratic(
        DenseMatrix::from_rows(&[alloc::vec![4.0, -1.0], alloc::vec![-1.0, 8.0]])?,
        alloc::vec![0.0, 5.0],
        -1.0,
    )?;
    Ok(Preset {
        model: TmgModel::new(gaussian, alloc::vec![inside, outside], Frame::Canonical)?,
        init: alloc::vec![2.0, 0.0],
    })
}

/// Binary labels with regressors for probit regression.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbitData {
    labels: Vec<f64>,
    regressors: Vec<Vec<f64>>,
    prior_variance: f64,
}

impl ProbitData {
    pub fn new(labels: Vec<f64>, regressors: Vec<Vec<f64>>, prior_variance: f64) -> Result<Self> {
        if labels.len() != regressors.len() {
            return Err(Error::DimensionMismatch { expected: regressors.len(), got: labels.len() });
        }
        if labels.iter().any(|y| *y != 1.0 && *y != -1.0) {
            return Err(Error::InvalidArgument("labels must be +1 or -1"));
        }
        if labels.is_empty() {
            return Err(Error::InvalidArgument("probit data needs at least one observation"));
        }
        Ok(Self { labels, regressors, prior_variance })
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn regressors(&self) -> &[Vec<f64>] {
        &self.regressors
    }

    pub fn prior_variance(&self) -> f64 {
        self.prior_variance
    }

    pub fn n_params(&self) -> usize {
        self.regressors[0].len()
    }
}

/// Coefficients used by [`generate_probit`].
pub const PROBIT_BETA: [f64; 3] = [-9.0, 20.0, 27.0];

/// Synthetic data: `z = (1, U[-5, 5], N(-4, sd 4))`, `w = -z·β + ε`,
/// `y = sign(w)`, prior variance 1.
pub fn generate_probit(n_obs: usize, seed: u64) -> Result<ProbitData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::with_capacity(n_obs);
    let mut regressors = Vec::with_capacity(n_obs);
    for _ in 0..n_obs {
        let z2 = rng.random_range(-5.0..=5.0);
        let z3 = -4.0 + 4.0 * rng.sample::<f64, _>(StandardNormal);
        let z = alloc::vec![1.0, z2, z3];
        let eps: f64 = rng.sample(StandardNormal);
        let w = -(z[0] * PROBIT_BETA[0] + z[1] * PROBIT_BETA[1] + z[2] * PROBIT_BETA[2]) + eps;
        labels.push(if w >= 0.0 { 1.0 } else { -1.0 });
        regressors.push(z);
    }
    ProbitData::new(labels, regressors, 1.0)
}

/// Joint Gaussian on `(β, w)` with the block precision of
/// [`RegressionPrecision`], zero mean, and constraints `y_i w_i ≥ 0`.
pub fn build_probit(data: &ProbitData, frame: Frame) -> Result<Preset> {
    let precision = RegressionPrecision::new(&data.regressors, data.prior_variance)?;
    let p = precision.n_params();
    let d = precision.dim();
    let gaussian = GaussianSpec::precision(StructuredMatrix::Regression(precision), alloc::vec![0.0; d])?;
    let mut constraints = Vec::with_capacity(data.labels.len());
    let mut init = alloc::vec![0.0; d];
    for (i, &y) in data.labels.iter().enumerate() {
        let mut f = alloc::vec![0.0; d];
        f[p + i] = y;
        constraints.push(Constraint::Linear(LinearConstraint::new(f, 0.0)?));
        init[p + i] = y;
    }
    Ok(Preset { model: TmgModel::new(gaussian, constraints, frame)?, init })
}

/// Random walk from `start` to `barrier` in `steps` steps staying below the
/// barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeSpec {
    pub start: f64,
    pub barrier: f64,
    pub steps: usize,
    pub noise_variance: f64,
}

impl BridgeSpec {
    pub fn new(start: f64, barrier: f64, steps: usize, noise_variance: f64) -> Result<Self> {
        if !(start <= barrier) {
            return Err(Error::InvalidArgument("bridge start must not exceed the barrier"));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument("bridge needs at least two steps"));
        }
        if !(noise_variance > 0.0) || !noise_variance.is_finite() {
            return Err(Error::InvalidArgument("noise variance must be positive"));
        }
        Ok(Self { start, barrier, steps, noise_variance })
    }
}

/// `(T - 1)`-dimensional path model with tridiagonal precision
/// `σ⁻² tridiag(-1, 2, -1)`, linear term `σ⁻² (L, 0, …, 0, H)` and
/// constraints `H - V_t ≥ 0`. Started strictly below the barrier.
pub fn build_bridge(spec: &BridgeSpec) -> Result<Preset> {
    let d = spec.steps - 1;
    let inv = 1.0 / spec.noise_variance;
    let precision = BandedMatrix::tridiagonal(d, 2.0 * inv, -inv);
    let mut r = alloc::vec![0.0; d];
    r[0] += spec.start * inv;
    r[d - 1] += spec.barrier * inv;
    let gaussian = GaussianSpec::precision(StructuredMatrix::Banded(precision), r)?;
    let mut constraints = Vec::with_capacity(d);
    for t in 0..d {
        constraints.push(Constraint::Linear(LinearConstraint::upper_bound(d, t, spec.barrier)?));
    }
    let big_t = spec.steps as f64;
    let sigma = libm::sqrt(spec.noise_variance);
    let init = (1..=d)
        .map(|t| {
            let t = t as f64;
            spec.start + (spec.barrier - spec.start) * t / big_t - 0.5 * sigma * libm::sqrt(t * (big_t - t) / big_t)
        })
        .collect();
    Ok(Preset { model: TmgModel::new(gaussian, constraints, Frame::General)?, init })
}

/// Stationary kernel of a quantized GP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `σ² exp(-|Δx|² / (2 η²))`
    SquaredExponential { variance: f64, length_sq: f64 },
    /// `σ² δ(Δx)`
    White { variance: f64 },
}

impl Kernel {
    fn eval(&self, dx: f64) -> f64 {
        match *self {
            Kernel::SquaredExponential { variance, length_sq } => variance * libm::exp(-dx * dx / (2.0 * length_sq)),
            Kernel::White { variance } => if dx == 0.0 { variance } else { 0.0 },
        }
    }

    fn variance(&self) -> f64 {
        match *self {
            Kernel::SquaredExponential { variance, .. } | Kernel::White { variance } => variance,
        }
    }
}

/// Relative diagonal jitter added to smooth kernels so the dense Cholesky
/// factor exists.
pub const KERNEL_NUGGET: f64 = 1e-6;

/// Grid values observed only through their quantization level.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedGpData {
    pub grid: Vec<f64>,
    pub kernel: Kernel,
    /// `z_1 < … < z_{K+1}`; the ends may be infinite
    pub thresholds: Vec<f64>,
    /// level index `k` (0-based) with `z_k ≤ y_i < z_{k+1}`
    pub observed: Vec<usize>,
}

impl QuantizedGpData {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.len() != self.observed.len() {
            return Err(Error::DimensionMismatch { expected: self.grid.len(), got: self.observed.len() });
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("grid must be strictly increasing"));
        }
        if self.thresholds.len() < 2 || self.thresholds.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("thresholds must be strictly increasing"));
        }
        if self.thresholds[1..self.thresholds.len() - 1].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("only the outer thresholds may be infinite"));
        }
        let levels = self.thresholds.len() - 1;
        if self.observed.iter().any(|&k| k >= levels) {
            return Err(Error::InvalidArgument("observed level out of range"));
        }
        if !(self.kernel.variance() > 0.0) {
            return Err(Error::InvalidArgument("kernel variance must be positive"));
        }
        Ok(())
    }

    fn uniform_spacing(&self) -> Option<f64> {
        if self.grid.len() < 2 {
            return Some(1.0);
        }
        let h = (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64;
        let ok = self.grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        ok.then_some(h)
    }
}

/// Warning attached when a non-uniform grid forces dense storage.
pub const NON_UNIFORM_GRID: &str = "non-uniform grid: dense covariance used instead of the Toeplitz path";

/// Zero-mean GP in covariance form (Toeplitz on uniform grids) with one or
/// two bound constraints per point.
pub fn build_quantized_gp(data: &QuantizedGpData) -> Result<Preset> {
    data.validate()?;
    let n = data.grid.len();
    let nugget = match data.kernel {
        Kernel::SquaredExponential { variance, .. } => KERNEL_NUGGET * variance,
        Kernel::White { .. } => 0.0,
    };
    let (matrix, warning) = match data.uniform_spacing() {
        Some(h) => {
            let row = (0..n).map(|k| data.kernel.eval(k as f64 * h) + if k == 0 { nugget } else { 0.0 }).collect();
            (StructuredMatrix::Toeplitz(ToeplitzMatrix::new(row)?), None)
        }
        None => {
            let m = DenseMatrix::from_fn(n, |i, j| {
                data.kernel.eval(data.grid[i] - data.grid[j]) + if i == j { nugget } else { 0.0 }
            });
            (StructuredMatrix::Dense(m), Some(NON_UNIFORM_GRID))
        }
    };
    let gaussian = GaussianSpec::covariance(matrix, alloc::vec![0.0; n])?;
    let sd = libm::sqrt(data.kernel.variance());
    let mut constraints = Vec::with_capacity(2 * n);
    let mut init = Vec::with_capacity(n);
    for (i, &k) in data.observed.iter().enumerate() {
        let lo = data.thresholds[k];
        let hi = data.thresholds[k + 1];
        if lo.is_finite() {
            constraints.push(Constraint::Linear(LinearConstraint::lower_bound(n, i, lo)?));
        }
        if hi.is_finite() {
            constraints.push(Constraint::Linear(LinearConstraint::upper_bound(n, i, hi)?));
        }
        init.push(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 0.5 * sd,
            (false, true) => hi - 0.5 * sd,
            (false, false) => 0.0,
        });
    }
    let mut model = TmgModel::new(gaussian, constraints, Frame::General)?;
    if let Some(w) = warning {
        model = model.with_warning(w);
    }
    Ok(Preset { model, init })
}

/// Quantizes a draw from the GP on `n` points with spacing `spacing`
/// into four levels split at `0` and `±0.5`. Returns the data and the latent
/// draw.
pub fn generate_quantized_gp(n: usize, spacing: f64, variance: f64, length_sq: f64, seed: u64) -> Result<(QuantizedGpData, Vec<f64>)> {
    let grid: Vec<f64> = (0..n).map(|i| i as f64 * spacing).collect();
    let row = squared_exponential_row(n, spacing, variance, length_sq, KERNEL_NUGGET * variance);
    let embedding = CirculantEmbedding::new(&ToeplitzMatrix::new(row)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = embedding.draw(&mut rng);
    let thresholds = alloc::vec![f64::NEG_INFINITY, -0.5, 0.0, 0.5, f64::INFINITY];
    let observed = truth.iter().map(|&y| thresholds[1..4].iter().filter(|&&z| y >= z).count()).collect();
    let data = QuantizedGpData {
        grid,
        kernel: Kernel::SquaredExponential { variance, length_sq },
        thresholds,
        observed,
    };
    Ok((data, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn smallest_bridge() {
        let p = build_bridge(&BridgeSpec::new(-1.0, 2.0, 2, 0.5).unwrap()).unwrap();
        let g = p.model.gaussian();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.matrix().to_dense().get(0, 0), 4.0);
        assert_eq!(g.linear_term(), &[2.0]);
    }

    #[test]
    fn bridge_precision_is_plus_two_tridiagonal() {
        let p = build_bridge(&BridgeSpec::new(-40.0, -20.0, 4, 1.0).unwrap()).unwrap();
        let m = p.model.gaussian().matrix().to_dense();
        assert_eq!(m.rows(), vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        p.model.check_init(&p.init).unwrap();
    }

    #[test]
    fn probit_smallest_instance() {
        let data = ProbitData::new(vec![1.0], vec![vec![1.0]], 1.0).unwrap();
        let p = build_probit(&data, Frame::General).unwrap();
        assert_eq!(p.model.gaussian().matrix().to_dense().rows(), vec![vec![2.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(p.model.constraints().len(), 1);
        assert_eq!(p.model.constraints()[0].value(&[0.0, 0.5]), 0.5);
    }

    #[test]
    fn qgp_edge_levels_get_one_constraint() {
        let data = QuantizedGpData {
            grid: vec![0.0, 1.0],
            kernel: Kernel::White { variance: 1.0 },
            thresholds: vec![f64::NEG_INFINITY, 0.0, f64::INFINITY],
            observed: vec![0, 1],
        };
        let p = build_quantized_gp(&data).unwrap();
        let cs = p.model.constraints();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0], Constraint::linear(vec![-1.0, 0.0], 0.0).unwrap());
        assert_eq!(cs[1], Constraint::linear(vec![0.0, 1.0], 0.0).unwrap());
        assert!(p.model.warnings().is_empty());
    }

    #[test]
    fn qgp_non_uniform_grid_falls_back_to_dense() {
        let data = QuantizedGpData {
            grid: vec![0.0, 1.0, 3.0],
            kernel: Kernel::SquaredExponential { variance: 0.6, length_sq: 0.2 },
            thresholds: vec![f64::NEG_INFINITY, 0.0, f64::INFINITY],
            observed: vec![0, 1, 1],
        };
        let p = build_quantized_gp(&data).unwrap();
        assert_eq!(p.model.warnings(), &[NON_UNIFORM_GRID]);
    }

    #[test]
    fn presets_start_feasible() {
        for p in [wedge().unwrap(), ellipses().unwrap()] {
            p.model.check_init(&p.init).unwrap();
        }
        let probit = build_probit(&generate_probit(50, 1).unwrap(), Frame::General).unwrap();
        probit.model.check_init(&probit.init).unwrap();
        let (data, truth) = generate_quantized_gp(64, 0.05, 0.6, 0.2, 2).unwrap();
        let q = build_quantized_gp(&data).unwrap();
        q.model.check_init(&q.init).unwrap();
        q.model.check_init(&truth).unwrap();
    }
}
