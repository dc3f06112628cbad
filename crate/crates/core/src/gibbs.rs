//! Slice-augmented Gibbs sampler for linearly constrained Gaussians.
//!
//! Works in the canonical frame. Each sweep draws the auxiliary level
//! `u ~ U(0, exp(-|z|²/2))`, which confines `z` to the ball
//! `|z|² ≤ -2 log u`, then updates every coordinate uniformly on the
//! intersection of that ball's chord with the linear constraints.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::constraints::{self, Constraint};
use crate::engine::{ChainResult, Clock, NoClock, SampleMatrix, TmgModel};
use crate::{Error, Result, FEASIBILITY_TOL};

/// Position (canonical coordinates) and the auxiliary slice level.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub position: Vec<f64>,
    /// `-2 log u`, the squared radius of the slice.
    pub auxiliary: f64,
}

/// Whitened linear constraints stored by column for coordinate updates.
#[derive(Debug, Clone)]
pub struct GibbsSampler<'m> {
    model: &'m TmgModel,
    offsets: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    /// `columns[i]` lists `(constraint, F_ji)` with `F_ji ≠ 0`
    columns: Vec<Vec<(usize, f64)>>,
}

impl<'m> GibbsSampler<'m> {
    pub fn new(model: &'m TmgModel) -> Result<Self> {
        if let Some(j) = model.constraints().iter().position(|c| !matches!(c, Constraint::Linear(_))) {
            return Err(Error::UnsupportedConstraint { constraint: j });
        }
        let g = model.gaussian();
        g.factor().ensure_dense()?;
        let whitened = constraints::transform_all(model.constraints(), Some(g.factor()), g.mean())?;
        let d = model.dim();
        let mut offsets = Vec::with_capacity(whitened.len());
        let mut rows = Vec::with_capacity(whitened.len());
        let mut columns = alloc::vec![Vec::new(); d];
        for (j, c) in whitened.iter().enumerate() {
            let Constraint::Linear(l) = c else { unreachable!() };
            offsets.push(l.offset());
            let mut row = Vec::new();
            for (i, &f) in l.normal().iter().enumerate() {
                if f != 0.0 {
                    columns[i].push((j, f));
                    row.push((i, f));
                }
            }
            rows.push(row);
        }
        Ok(Self { model, offsets, rows, columns })
    }

    fn values(&self, z: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.offsets)
            .map(|(row, g)| row.iter().map(|&(i, f)| f * z[i]).sum::<f64>() + g)
            .collect()
    }

    /// One full sweep over all coordinates.
    pub fn sweep<R: Rng + ?Sized>(&self, state: GibbsState, rng: &mut R) -> Result<GibbsState> {
        let mut z = state.position;
        let mut norm_sq: f64 = z.iter().map(|v| v * v).sum();
        let e: f64 = rng.sample(Exp1);
        let radius_sq = norm_sq + 2.0 * e;
        let mut k = self.values(&z);
        for i in 0..z.len() {
            let zi = z[i];
            let others = (norm_sq - zi * zi).max(0.0);
            let h = libm::sqrt((radius_sq - others).max(zi * zi));
            let (mut lo, mut hi) = (-h, h);
            for &(j, f) in &self.columns[i] {
                let rest = k[j] - f * zi;
                let bound = -rest / f;
                if f > 0.0 {
                    lo = lo.max(bound);
                } else {
                    hi = hi.min(bound);
                }
            }
            if lo > hi || zi < lo || zi > hi {
                // rounding only: the current value must lie within tolerance
                let slack = FEASIBILITY_TOL * (1.0 + zi.abs());
                if zi < lo - slack || zi > hi + slack {
                    return Err(Error::EmptyConditionalInterval { coordinate: i, lower: lo, upper: hi });
                }
                lo = lo.min(zi);
                hi = hi.max(zi);
            }
            let u: f64 = rng.random();
            let new = lo + u * (hi - lo);
            for &(j, f) in &self.columns[i] {
                k[j] += f * (new - zi);
            }
            norm_sq += new * new - zi * zi;
            z[i] = new;
        }
        Ok(GibbsState { position: z, auxiliary: radius_sq })
    }

    pub fn to_canonical(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.model.gaussian().whiten(x)
    }

    pub fn from_canonical(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.model.gaussian().unwhiten(z)
    }
}

/// One sweep for a model with linear constraints; `state` is in canonical
/// coordinates.
pub fn gibbs_sweep<R: Rng + ?Sized>(model: &TmgModel, state: GibbsState, rng: &mut R) -> Result<GibbsState> {
    GibbsSampler::new(model)?.sweep(state, rng)
}

/// Gibbs counterpart of [`run_chain`](crate::engine::run_chain). Bounce
/// counts are zero and energies are empty.
pub fn run_gibbs(model: &TmgModel, n: usize, burn_in: usize, init: &[f64], seed: u64) -> Result<ChainResult> {
    run_gibbs_with_clock(model, n, burn_in, init, seed, &NoClock)
}

pub fn run_gibbs_with_clock(
    model: &TmgModel,
    n: usize,
    burn_in: usize,
    init: &[f64],
    seed: u64,
    clock: &dyn Clock,
) -> Result<ChainResult> {
    model.check_init(init)?;
    let sampler = GibbsSampler::new(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let position = sampler.to_canonical(init)?;
    let mut state = GibbsState { auxiliary: position.iter().map(|v| v * v).sum(), position };
    let mut samples = SampleMatrix::with_capacity(n, model.dim());
    let start = clock.now();
    for it in 0..burn_in + n {
        state = sampler.sweep(state, &mut rng)?;
        if it >= burn_in {
            samples.push(&sampler.from_canonical(&state.position)?);
        }
    }
    let wall_clock = clock.now() - start;
    Ok(ChainResult { samples, bounce_counts: alloc::vec![0; n], energies: Vec::new(), seed, wall_clock })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::LinearConstraint;
    use crate::engine::Frame;
    use crate::linalg::GaussianSpec;
    use alloc::vec;

    #[test]
    fn half_normal_mean() {
        let c = Constraint::Linear(LinearConstraint::new(vec![1.0], 0.0).unwrap());
        let model = TmgModel::new(GaussianSpec::standard(1).unwrap(), vec![c], Frame::Canonical).unwrap();
        let r = run_gibbs(&model, 50_000, 100, &[1.0], 9).unwrap();
        let x = r.samples.column(0);
        assert!(x.iter().all(|v| *v >= 0.0));
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        // generous bound: the chain is autocorrelated
        assert!((mean - libm::sqrt(2.0 / core::f64::consts::PI)).abs() < 0.03, "{mean}");
    }

    #[test]
    fn quadratic_constraints_are_unsupported() {
        let q = Constraint::quadratic(crate::linalg::DenseMatrix::identity(1), vec![0.0], -1.0).unwrap();
        let model = TmgModel::new(GaussianSpec::standard(1).unwrap(), vec![q], Frame::Canonical).unwrap();
        assert!(matches!(GibbsSampler::new(&model), Err(Error::UnsupportedConstraint { constraint: 0 })));
    }
}
