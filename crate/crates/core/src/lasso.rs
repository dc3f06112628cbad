//! Exact HMC for the Bayesian Lasso.
//!
//! Given `σ²`, the coefficient posterior is piecewise Gaussian:
//! `-log p(β) = (1/2σ²) βᵀ M β - (1/σ²) Σ L_i(s_i) β_i + const` with
//! `L_i(s) = c_i - λ s_i` and `s = sign(β)`. Within an orthant the motion is
//! `β(t) = μ(s) + a sin t + b cos t` with `μ(s) = M⁻¹ L(s)`; crossing a
//! coordinate plane flips one sign and moves the center.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, StandardNormal};

use crate::constraints::{self, linear_hit_time, LinearConstraint, Trajectory};
use crate::engine::{SampleMatrix, DEFAULT_TRAVEL_TIME};
use crate::linalg::{dot, DenseLower, DenseMatrix};
use crate::{Error, Result, BOUNCE_LIMIT, FEASIBILITY_TOL};

/// Exactly-zero coordinates are moved to this value before sampling.
pub const ZERO_PERTURBATION: f64 = 1e-12;

/// Signs `s_i ∈ {-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    /// `sign(β_i)`, with `+1` for zeros.
    pub fn from_beta(beta: &[f64]) -> Self {
        Self(beta.iter().map(|b| if *b < 0.0 { -1 } else { 1 }).collect())
    }

    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1"));
        }
        Ok(Self(signs))
    }

    pub fn get(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }
}

/// Conditional of `β` given `σ²`.
#[derive(Debug, Clone)]
pub struct LassoModel {
    m: DenseMatrix,
    factor: DenseLower,
    /// columns of `M⁻¹`, `inverse[j]`
    inverse: Vec<Vec<f64>>,
    c: Vec<f64>,
    lambda: f64,
    sigma2: f64,
    travel_time: f64,
    constraints: Vec<LinearConstraint>,
}

impl LassoModel {
    /// `m = Σ z zᵀ`, `c = Σ y z`.
    pub fn new(m: DenseMatrix, c: Vec<f64>, lambda: f64, sigma2: f64) -> Result<Self> {
        let d = m.dim();
        if c.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: c.len() });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument("lambda must be positive"));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidArgument("sigma2 must be positive"));
        }
        m.check_symmetric(crate::linalg::SYMMETRY_TOL)?;
        let factor = DenseLower::factor(&m)?;
        let inverse = (0..d)
            .map(|j| {
                let mut e = alloc::vec![0.0; d];
                e[j] = 1.0;
                factor.solve_upper(&factor.solve_lower(&e))
            })
            .collect();
        Ok(Self { m, factor, inverse, c, lambda, sigma2, travel_time: DEFAULT_TRAVEL_TIME, constraints: Vec::new() })
    }

    /// Builds `M` and `c` from regression data (`z` one row per observation).
    pub fn from_data(data: &LassoData, lambda: f64, sigma2: f64) -> Result<Self> {
        let d = data.n_params();
        let mut m = DenseMatrix::zeros(d);
        let mut c = alloc::vec![0.0; d];
        for (z, y) in data.z.iter().zip(&data.y) {
            for i in 0..d {
                c[i] += y * z[i];
                for j in 0..d {
                    m.set(i, j, m.get(i, j) + z[i] * z[j]);
                }
            }
        }
        Self::new(m, c, lambda, sigma2)
    }

    /// Extra constraints `F·β + g ≥ 0`, handled as walls alongside sign flips.
    pub fn with_constraints(mut self, constraints: Vec<LinearConstraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.dim() != self.dim()) {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: c.dim() });
        }
        self.constraints = constraints;
        Ok(self)
    }

    pub fn with_travel_time(mut self, travel_time: f64) -> Result<Self> {
        if !(travel_time > 0.0) || !travel_time.is_finite() {
            return Err(Error::InvalidArgument("travel time must be positive"));
        }
        self.travel_time = travel_time;
        Ok(self)
    }

    pub fn set_sigma2(&mut self, sigma2: f64) -> Result<()> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidArgument("sigma2 must be positive"));
        }
        self.sigma2 = sigma2;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// `L(s) = c - λ s`
    pub fn linear_term(&self, s: &SignVector) -> Vec<f64> {
        self.c.iter().enumerate().map(|(i, c)| c - self.lambda * s.get(i)).collect()
    }

    /// `H = (1/2σ²) (βᵀMβ - 2 L(s)ᵀβ + β̇ᵀMβ̇)`
    pub fn energy(&self, s: &SignVector, beta: &[f64], velocity: &[f64]) -> f64 {
        let l = self.linear_term(s);
        (self.m.bilinear(beta, beta) - 2.0 * dot(&l, beta) + self.m.bilinear(velocity, velocity)) / (2.0 * self.sigma2)
    }

    /// Velocity draw `β̇ ~ N(0, σ² M⁻¹)`.
    pub fn refresh_velocity<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let eps: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let sd = libm::sqrt(self.sigma2);
        self.factor.solve_upper(&eps).into_iter().map(|v| sd * v).collect()
    }
}

/// `μ(s) = M⁻¹ L(s)`
pub fn lasso_center(model: &LassoModel, s: &SignVector) -> Vec<f64> {
    let l = model.linear_term(s);
    model.factor.solve_upper(&model.factor.solve_lower(&l))
}

/// First `t > HIT_GUARD` where coordinate `i` of the trajectory crosses zero
/// leaving the orthant of sign `sign`.
pub(crate) fn crossing_time_with_sign(traj: &Trajectory, i: usize, sign: f64) -> Option<f64> {
    constraints::hit::sinusoid_down_crossing(sign * traj.mu[i], sign * traj.a[i], sign * traj.b[i])
}

/// First time coordinate `i` crosses zero, leaving the orthant it starts in.
/// Only `(μ_i, a_i, b_i)` are involved.
pub fn sign_crossing_time(traj: &Trajectory, i: usize) -> Option<f64> {
    let start = traj.mu[i] + traj.b[i];
    crossing_time_with_sign(traj, i, if start < 0.0 { -1.0 } else { 1.0 })
}

/// Flips `s_j` and returns the new signs and centers. The center moves by
/// `2 s_j λ M⁻¹ e_j`.
pub fn flip_sign(model: &LassoModel, s: &SignVector, j: usize) -> (SignVector, Vec<f64>) {
    let mut next = s.clone();
    next.0[j] = -next.0[j];
    (next.clone(), lasso_center(model, &next))
}

/// Per-iteration summary for the Lasso step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LassoStats {
    pub flips: usize,
    pub bounces: usize,
    pub energy_start: f64,
    pub energy_end: f64,
}

/// State reached after integrating.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoState {
    pub beta: Vec<f64>,
    pub velocity: Vec<f64>,
    pub signs: SignVector,
}

/// Integrates `duration` of trajectory time with sign flips and walls.
pub fn lasso_integrate(model: &LassoModel, beta: &[f64], velocity: &[f64], duration: f64) -> Result<(LassoState, LassoStats)> {
    let d = model.dim();
    if beta.len() != d || velocity.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: beta.len().min(velocity.len()) });
    }
    let mut beta: Vec<f64> = beta.iter().map(|b| if *b == 0.0 { ZERO_PERTURBATION } else { *b }).collect();
    let mut signs = SignVector::from_beta(&beta);
    let mut velocity = velocity.to_vec();
    let mut mu = lasso_center(model, &signs);
    let mut remaining = duration;
    let mut stats = LassoStats::default();
    stats.energy_start = model.energy(&signs, &beta, &velocity);
    loop {
        let traj = Trajectory::new(mu.clone(), &beta, &velocity);
        // earliest event: sign crossings first, then walls; ties keep the lower index
        let mut best: Option<(f64, Event)> = None;
        for i in 0..d {
            if let Some(t) = crossing_time_with_sign(&traj, i, signs.get(i)) {
                if best.as_ref().is_none_or(|(b, _)| t < *b) {
                    best = Some((t, Event::Flip(i)));
                }
            }
        }
        for (k, c) in model.constraints.iter().enumerate() {
            if let Some(t) = linear_hit_time(&traj, c) {
                if best.as_ref().is_none_or(|(b, _)| t < *b) {
                    best = Some((t, Event::Wall(k)));
                }
            }
        }
        match best {
            Some((t, event)) if t < remaining => {
                beta = traj.position(t);
                velocity = traj.velocity(t);
                remaining -= t;
                match event {
                    Event::Flip(j) => {
                        beta[j] = 0.0;
                        let old = signs.get(j);
                        signs.0[j] = -signs.0[j];
                        let shift = 2.0 * old * model.lambda;
                        for (m, inv) in mu.iter_mut().zip(&model.inverse[j]) {
                            *m += shift * inv;
                        }
                        stats.flips += 1;
                    }
                    Event::Wall(k) => {
                        let n = model.constraints[k].normal();
                        let sn: Vec<f64> = (0..d).map(|i| dot(&model.inverse[i], n)).collect();
                        velocity = constraints::reflect_metric(&velocity, n, &sn)?;
                        stats.bounces += 1;
                    }
                }
                if stats.flips + stats.bounces > BOUNCE_LIMIT {
                    return Err(Error::EventLimitExceeded { limit: BOUNCE_LIMIT });
                }
            }
            _ => {
                beta = traj.position(remaining);
                velocity = traj.velocity(remaining);
                break;
            }
        }
    }
    for (k, c) in model.constraints.iter().enumerate() {
        let v = c.value(&beta);
        if !(v >= -FEASIBILITY_TOL) {
            return Err(Error::InfeasibleState { constraint: k, value: v });
        }
    }
    stats.energy_end = model.energy(&signs, &beta, &velocity);
    Ok((LassoState { beta, velocity, signs }, stats))
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Flip(usize),
    Wall(usize),
}

/// One exact-HMC iteration for `β` at the model's current `σ²`.
pub fn lasso_beta_step<R: Rng + ?Sized>(model: &LassoModel, beta: &[f64], rng: &mut R) -> Result<(Vec<f64>, LassoStats)> {
    let velocity = model.refresh_velocity(rng);
    let (state, stats) = lasso_integrate(model, beta, &velocity, model.travel_time)?;
    Ok((state.beta, stats))
}

/// Regression data for the joint chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoData {
    z: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl LassoData {
    pub fn new(z: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if z.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: z.len(), got: y.len() });
        }
        let d = z.first().map_or(0, Vec::len);
        if let Some(row) = z.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: row.len() });
        }
        if y.is_empty() {
            return Err(Error::InvalidArgument("regression needs at least one observation"));
        }
        Ok(Self { z, y })
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn n_params(&self) -> usize {
        self.z[0].len()
    }

    pub fn regressors(&self) -> &[Vec<f64>] {
        &self.z
    }

    pub fn responses(&self) -> &[f64] {
        &self.y
    }

    /// `‖y - Zβ‖²`
    pub fn rss(&self, beta: &[f64]) -> f64 {
        self.z.iter().zip(&self.y).map(|(z, y)| (y - dot(z, beta)) * (y - dot(z, beta))).sum()
    }
}

/// Coefficient pattern repeated by [`generate_lasso_data`].
pub const LASSO_PATTERN: [f64; 8] = [3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];

/// Synthetic regression: standard normal regressors, coefficients cycling
/// through [`LASSO_PATTERN`], noise standard deviation `noise_sd`.
/// Returns the data and the true coefficients.
pub fn generate_lasso_data(n_obs: usize, n_params: usize, noise_sd: f64, seed: u64) -> Result<(LassoData, Vec<f64>)> {
    if n_params == 0 {
        return Err(Error::InvalidArgument("regression needs at least one coefficient"));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(Error::InvalidArgument("noise standard deviation must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta: Vec<f64> = (0..n_params).map(|i| LASSO_PATTERN[i % LASSO_PATTERN.len()]).collect();
    let mut z = Vec::with_capacity(n_obs);
    let mut y = Vec::with_capacity(n_obs);
    for _ in 0..n_obs {
        let row: Vec<f64> = (0..n_params).map(|_| rng.sample(StandardNormal)).collect();
        let e: f64 = rng.sample(StandardNormal);
        y.push(dot(&row, &beta) + noise_sd * e);
        z.push(row);
    }
    Ok((LassoData::new(z, y)?, beta))
}

/// Draws `σ²` from its conditional under `p(σ²) ∝ 1/σ²`:
/// inverse-gamma with shape `N/2 + d` and scale `rss/2 + λ Σ|β_i|`.
/// The `d` (not `d/2`) comes from the `(λ / 2σ²)^d` normalizer of the prior.
pub fn sigma2_step<R: Rng + ?Sized>(n_obs: usize, rss: f64, l1: f64, d: usize, lambda: f64, rng: &mut R) -> Result<f64> {
    if n_obs == 0 {
        return Err(Error::InvalidArgument("sigma2 step needs at least one observation"));
    }
    let shape = n_obs as f64 / 2.0 + d as f64;
    let scale = rss / 2.0 + lambda * l1;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument("sigma2 conditional has a non-positive scale"));
    }
    let g = Gamma::new(shape, 1.0).map_err(|_| Error::InvalidArgument("invalid gamma shape"))?;
    let x: f64 = rng.sample(g);
    Ok(scale / x)
}

/// Samples of the joint `(β, σ²)` chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoChain {
    /// `n × d`
    pub beta: SampleMatrix,
    pub sigma2: Vec<f64>,
    pub flips: Vec<usize>,
    pub max_energy_drift: f64,
    pub seed: u64,
}

/// Alternates `σ² | β` and the exact-HMC `β | σ²` step.
pub fn run_lasso_chain(
    data: &LassoData,
    lambda: f64,
    n: usize,
    burn_in: usize,
    init_beta: &[f64],
    init_sigma2: f64,
    seed: u64,
) -> Result<LassoChain> {
    let mut model = LassoModel::from_data(data, lambda, init_sigma2)?;
    if init_beta.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: init_beta.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut beta = init_beta.to_vec();
    let d = model.dim();
    let mut out = LassoChain {
        beta: SampleMatrix::with_capacity(n, d),
        sigma2: Vec::with_capacity(n),
        flips: Vec::with_capacity(n),
        max_energy_drift: 0.0,
        seed,
    };
    for it in 0..burn_in + n {
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let s2 = sigma2_step(data.n_obs(), data.rss(&beta), l1, d, lambda, &mut rng)?;
        model.set_sigma2(s2)?;
        let (next, stats) = lasso_beta_step(&model, &beta, &mut rng)?;
        beta = next;
        if it >= burn_in {
            out.beta.push(&beta);
            out.sigma2.push(s2);
            out.flips.push(stats.flips);
            out.max_energy_drift = out.max_energy_drift.max((stats.energy_end - stats.energy_start).abs());
        }
    }
    Ok(out)
}
