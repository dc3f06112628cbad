//! The exact-HMC chain.
//!
//! The sampler works in *working coordinates* centered at the Gaussian mean:
//!
//! - [`Frame::Canonical`]: `z = W⁻¹ (x - μ)`, so the Gaussian is `N(0, I)`,
//!   velocities are standard normal and reflections are Euclidean.
//! - [`Frame::General`]: `y = x - μ`, velocities are drawn from `N(0, M⁻¹)`
//!   and reflections preserve `vᵀ M v`. Sparse constraints stay sparse.
//!
//! In both frames the free motion is `y(t) = a sin t + b cos t`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constraints::{self, hit, Constraint, Factor, HitEvent, Trajectory};
use crate::linalg::{dot, GaussianSpec};
use crate::{Error, Result, BOUNCE_LIMIT, FEASIBILITY_TOL};

/// Travel time per iteration unless configured otherwise.
pub const DEFAULT_TRAVEL_TIME: f64 = FRAC_PI_2;

/// Contacts closer than this (in constraint value) are resolved as a corner.
const CONTACT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    Canonical,
    General,
}

/// A Gaussian restricted by inequality constraints.
#[derive(Debug, Clone)]
pub struct TmgModel {
    gaussian: GaussianSpec,
    constraints: Vec<Constraint>,
    frame: Frame,
    travel_time: f64,
    warnings: Vec<&'static str>,
}

impl TmgModel {
    pub fn new(gaussian: GaussianSpec, constraints: Vec<Constraint>, frame: Frame) -> Result<Self> {
        let d = gaussian.dim();
        if let Some(c) = constraints.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
        }
        Ok(Self { gaussian, constraints, frame, travel_time: DEFAULT_TRAVEL_TIME, warnings: Vec::new() })
    }

    pub fn with_travel_time(mut self, travel_time: f64) -> Result<Self> {
        if !(travel_time > 0.0) || !travel_time.is_finite() {
            return Err(Error::InvalidArgument("travel time must be positive"));
        }
        self.travel_time = travel_time;
        Ok(self)
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_warning(mut self, warning: &'static str) -> Self {
        self.warnings.push(warning);
        self
    }

    pub fn gaussian(&self) -> &GaussianSpec {
        &self.gaussian
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn travel_time(&self) -> f64 {
        self.travel_time
    }

    pub fn dim(&self) -> usize {
        self.gaussian.dim()
    }

    /// Notes attached by model builders (e.g. a structured path that fell
    /// back to dense storage).
    pub fn warnings(&self) -> &[&'static str] {
        &self.warnings
    }

    pub fn all_linear(&self) -> bool {
        self.constraints.iter().all(|c| matches!(c, Constraint::Linear(_)))
    }

    /// Position check against the original constraints: every value must be
    /// at least `-FEASIBILITY_TOL`, and every factor of a product must be
    /// nonnegative.
    pub fn check_init(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("initial point must be finite"));
        }
        for (j, c) in self.constraints.iter().enumerate() {
            if let Constraint::Product(p) = c {
                for (k, f) in p.factors().iter().enumerate() {
                    if f.value(x) < -FEASIBILITY_TOL {
                        if p.value(x) >= 0.0 {
                            return Err(Error::MixedSignProduct { constraint: j, factor: k });
                        }
                        return Err(Error::InfeasibleInit { constraint: j, value: p.value(x) });
                    }
                }
            }
            let v = c.value(x);
            if !(v >= -FEASIBILITY_TOL) {
                return Err(Error::InfeasibleInit { constraint: j, value: v });
            }
        }
        Ok(())
    }

    /// Smallest normalized slack over all constraints (and product factors).
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        let mut worst = f64::INFINITY;
        for c in &self.constraints {
            let s = match c {
                Constraint::Linear(l) => l.value(x) / libm::sqrt(dot(l.normal(), l.normal())),
                Constraint::Quadratic(q) => q.value(x),
                Constraint::Product(p) => p
                    .factors()
                    .iter()
                    .map(|f| match f {
                        Factor::Linear(l) => l.value(x) / libm::sqrt(dot(l.normal(), l.normal())),
                        Factor::Quadratic(q) => q.value(x),
                    })
                    .fold(f64::INFINITY, f64::min),
            };
            worst = worst.min(s);
        }
        worst
    }

    /// Deterministic interior-point search: coordinate-wise pattern search
    /// maximizing [`min_slack`](Self::min_slack), started at the
    /// unconstrained mean, for 100 sweeps.
    pub fn find_interior_point(&self) -> Result<Vec<f64>> {
        let mut x = self.gaussian.mean().to_vec();
        if self.constraints.is_empty() {
            return Ok(x);
        }
        let mut best = self.min_slack(&x);
        let mut step = 1.0_f64;
        for _ in 0..100 {
            let mut improved = false;
            for i in 0..x.len() {
                for dir in [1.0, -1.0] {
                    let old = x[i];
                    x[i] = old + dir * step;
                    let s = self.min_slack(&x);
                    if s > best {
                        best = s;
                        improved = true;
                        break;
                    }
                    x[i] = old;
                }
            }
            if !improved {
                step *= 0.5;
            } else {
                step *= 1.5;
            }
        }
        if best > 0.0 && self.check_init(&x).is_ok() {
            Ok(x)
        } else {
            Err(Error::NoInteriorPoint { slack: best })
        }
    }
}

/// Position and velocity in working coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Trajectory time elapsed within the current iteration.
    pub segment_time: f64,
}

impl ParticleState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>) -> Self {
        Self { position, velocity, segment_time: 0.0 }
    }
}

/// Per-iteration summary.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IterationStats {
    pub bounces: usize,
    pub energy_start: f64,
    pub energy_end: f64,
}

/// Sampler prepared for one model: constraints transformed into working
/// coordinates once.
#[derive(Debug, Clone)]
pub struct HmcSampler<'m> {
    model: &'m TmgModel,
    constraints: Vec<Constraint>,
    linear: Option<LinearCache>,
    /// Unused half of the last paired velocity draw.
    spare: RefCell<Option<Vec<f64>>>,
}

/// Largest `m·d` and `m²` for which the all-linear bookkeeping is kept.
const LINEAR_CACHE_LIMIT: usize = 1 << 22;

/// Reflection directions and their projections onto every normal, so that
/// the per-constraint `F·x`, `F·v` can be carried across bounces in O(m).
#[derive(Debug, Clone)]
struct LinearCache {
    /// `Σ n_k` in the general frame; empty in canonical (direction is `n_k`).
    directions: Vec<Vec<f64>>,
    denominators: Vec<f64>,
    offsets: Vec<f64>,
    /// `gram[k·m + j] = F_j · d_k`, so a reflection off `k` reads one row.
    gram: Vec<f64>,
}

impl LinearCache {
    fn build(model: &TmgModel, constraints: &[Constraint]) -> Result<Option<Self>> {
        let m = constraints.len();
        let d = model.dim();
        if m == 0 || m * m > LINEAR_CACHE_LIMIT || m * d > LINEAR_CACHE_LIMIT {
            return Ok(None);
        }
        let mut normals = Vec::with_capacity(m);
        for c in constraints {
            match c {
                Constraint::Linear(l) => normals.push(l),
                _ => return Ok(None),
            }
        }
        let directions = match model.frame {
            Frame::Canonical => Vec::new(),
            Frame::General => {
                let g = &model.gaussian;
                normals.iter().map(|l| g.covariance_mul(l.normal())).collect::<Result<Vec<_>>>()?
            }
        };
        let dir = |k: usize| -> &[f64] {
            if directions.is_empty() {
                normals[k].normal()
            } else {
                &directions[k]
            }
        };
        let mut denominators = Vec::with_capacity(m);
        for k in 0..m {
            let den = normals[k].dot(dir(k));
            if !(den > 0.0) || !den.is_finite() {
                return Err(Error::ZeroNormal);
            }
            denominators.push(den);
        }
        let mut gram = alloc::vec![0.0; m * m];
        for (j, l) in normals.iter().enumerate() {
            for k in 0..m {
                gram[k * m + j] = l.dot(dir(k));
            }
        }
        let offsets = normals.iter().map(|l| l.offset()).collect();
        Ok(Some(Self { directions, denominators, offsets, gram }))
    }
}

impl<'m> HmcSampler<'m> {
    pub fn new(model: &'m TmgModel) -> Result<Self> {
        let g = &model.gaussian;
        let factor = match model.frame {
            Frame::Canonical => {
                g.factor().ensure_dense()?;
                Some(g.factor())
            }
            Frame::General => None,
        };
        let constraints = constraints::transform_all(&model.constraints, factor, g.mean())?;
        let linear = LinearCache::build(model, &constraints)?;
        Ok(Self { model, constraints, linear, spare: RefCell::new(None) })
    }

    pub fn model(&self) -> &TmgModel {
        self.model
    }

    /// Constraints in working coordinates.
    pub fn working_constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn to_working(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = &self.model.gaussian;
        match self.model.frame {
            Frame::Canonical => g.whiten(x),
            Frame::General => {
                if x.len() != g.dim() {
                    return Err(Error::DimensionMismatch { expected: g.dim(), got: x.len() });
                }
                Ok(x.iter().zip(g.mean()).map(|(a, m)| a - m).collect())
            }
        }
    }

    pub fn from_working(&self, z: &[f64]) -> Result<Vec<f64>> {
        let g = &self.model.gaussian;
        match self.model.frame {
            Frame::Canonical => g.unwhiten(z),
            Frame::General => Ok(z.iter().zip(g.mean()).map(|(a, m)| a + m).collect()),
        }
    }

    /// Canonical: `N(0, I)`; general: `N(0, M⁻¹)` through the structured factor.
    pub fn refresh_velocity<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match self.model.frame {
            Frame::Canonical => Ok((0..self.model.dim()).map(|_| rng.sample(StandardNormal)).collect()),
            Frame::General => {
                if let Some(v) = self.spare.borrow_mut().take() {
                    return Ok(v);
                }
                let (v, spare) = self.model.gaussian.draw_centered_pair(rng)?;
                *self.spare.borrow_mut() = spare;
                Ok(v)
            }
        }
    }

    /// Hamiltonian of a working-coordinate state.
    pub fn energy(&self, position: &[f64], velocity: &[f64]) -> Result<f64> {
        match self.model.frame {
            Frame::Canonical => Ok(0.5 * (dot(position, position) + dot(velocity, velocity))),
            Frame::General => {
                let g = &self.model.gaussian;
                Ok(0.5 * (g.precision_norm_sq(position)? + g.precision_norm_sq(velocity)?))
            }
        }
    }

    fn reflect(&self, velocity: &[f64], normal: &[f64]) -> Result<Vec<f64>> {
        match self.model.frame {
            Frame::Canonical => constraints::reflect(velocity, normal),
            Frame::General => {
                let sn = self.model.gaussian.covariance_mul(normal)?;
                constraints::reflect_metric(velocity, normal, &sn)
            }
        }
    }

    /// Earliest hit before `window` over all constraints; ties go to the
    /// lowest index.
    fn first_hit(&self, traj: &Trajectory, window: f64) -> Result<Option<(f64, usize, Option<usize>)>> {
        let mut best: Option<(f64, usize, Option<usize>)> = None;
        // the search window shrinks to the best hit found so far
        let mut limit = window;
        let (mut sin_w, mut cos_w) = libm::sincos(window);
        for (j, c) in self.constraints.iter().enumerate() {
            let hit = match c {
                Constraint::Linear(l) => {
                    hit::sinusoid_crossing_within(l.offset(), l.dot(&traj.a), l.dot(&traj.b), limit, sin_w, cos_w)
                        .map(|t| (t, None))
                }
                _ => hit::constraint_hit(traj, c)?.filter(|&(t, _)| t < limit),
            };
            if let Some((t, k)) = hit {
                best = Some((t, j, k));
                limit = t;
                (sin_w, cos_w) = libm::sincos(t);
            }
        }
        Ok(best)
    }

    fn normal_at(&self, j: usize, factor: Option<usize>, x: &[f64]) -> Vec<f64> {
        match (&self.constraints[j], factor) {
            (Constraint::Product(p), Some(k)) => p.factors()[k].gradient(x),
            (c, _) => c.gradient(x),
        }
    }

    /// Constraints sitting on their wall (within `CONTACT_TOL`) while the
    /// velocity points outward: the second wall of a corner hit.
    fn outward_contact(&self, x: &[f64], v: &[f64], skip: usize) -> Option<(usize, Option<usize>, Vec<f64>)> {
        for (j, c) in self.constraints.iter().enumerate() {
            if j == skip {
                continue;
            }
            match c {
                Constraint::Linear(l) => {
                    if l.value(x).abs() <= CONTACT_TOL && l.dot(v) < 0.0 {
                        return Some((j, None, l.normal().to_vec()));
                    }
                }
                Constraint::Quadratic(q) => {
                    if q.value(x).abs() <= CONTACT_TOL {
                        let n = q.gradient(x);
                        if dot(&n, v) < 0.0 {
                            return Some((j, None, n));
                        }
                    }
                }
                Constraint::Product(p) => {
                    for (k, f) in p.factors().iter().enumerate() {
                        if f.value(x).abs() <= CONTACT_TOL {
                            let n = f.gradient(x);
                            if dot(&n, v) < 0.0 {
                                return Some((j, Some(k), n));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Advances the state by `duration` of trajectory time, bouncing off walls.
    pub fn integrate(&self, state: ParticleState, duration: f64) -> Result<(ParticleState, Vec<HitEvent>)> {
        if let Some(cache) = &self.linear {
            return self.integrate_linear(cache, state, duration);
        }
        let ParticleState { mut position, mut velocity, mut segment_time } = state;
        let mut remaining = duration;
        let mut events = Vec::new();
        loop {
            let traj = Trajectory::centered(&position, &velocity);
            match self.first_hit(&traj, remaining)? {
                Some((t, j, k)) => {
                    position = traj.position(t);
                    let v = traj.velocity(t);
                    let normal = self.normal_at(j, k, &position);
                    velocity = self.reflect(&v, &normal)?;
                    remaining -= t;
                    segment_time += t;
                    events.push(HitEvent { time: segment_time, constraint_index: j, factor_index: k, gradient: normal });
                    let mut last = j;
                    while let Some((j2, k2, n2)) = self.outward_contact(&position, &velocity, last) {
                        velocity = self.reflect(&velocity, &n2)?;
                        events.push(HitEvent { time: segment_time, constraint_index: j2, factor_index: k2, gradient: n2 });
                        last = j2;
                        if events.len() > BOUNCE_LIMIT {
                            break;
                        }
                    }
                    if events.len() > BOUNCE_LIMIT {
                        return Err(Error::BounceLimitExceeded { limit: BOUNCE_LIMIT });
                    }
                }
                None => {
                    position = traj.position(remaining);
                    velocity = traj.velocity(remaining);
                    segment_time += remaining;
                    break;
                }
            }
        }
        for (j, c) in self.constraints.iter().enumerate() {
            let v = c.value(&position);
            if !(v >= -FEASIBILITY_TOL) {
                return Err(Error::InfeasibleState { constraint: j, value: v });
            }
        }
        Ok((ParticleState { position, velocity, segment_time }, events))
    }

    fn integrate_linear(&self, cache: &LinearCache, state: ParticleState, duration: f64) -> Result<(ParticleState, Vec<HitEvent>)> {
        let ParticleState { mut position, mut velocity, mut segment_time } = state;
        let linear: Vec<_> = self
            .constraints
            .iter()
            .map(|c| match c {
                Constraint::Linear(l) => l,
                _ => unreachable!("cache is only built for linear constraints"),
            })
            .collect();
        let m = linear.len();
        let mut fx: Vec<f64> = linear.iter().map(|l| l.dot(&position)).collect();
        let mut fv: Vec<f64> = linear.iter().map(|l| l.dot(&velocity)).collect();
        let mut remaining = duration;
        let mut events = Vec::new();
        loop {
            let mut best: Option<(f64, usize)> = None;
            let mut limit = remaining;
            let (mut sin_w, mut cos_w) = libm::sincos(remaining);
            for (j, ((&g, &p), &q)) in cache.offsets.iter().zip(&fv).zip(&fx).enumerate() {
                if let Some(t) = hit::sinusoid_crossing_within(g, p, q, limit, sin_w, cos_w) {
                    best = Some((t, j));
                    limit = t;
                    (sin_w, cos_w) = libm::sincos(t);
                }
            }
            let t = best.map_or(remaining, |(t, _)| t);
            let (s, c) = libm::sincos(t);
            for (x, v) in position.iter_mut().zip(velocity.iter_mut()) {
                let (x0, v0) = (*x, *v);
                *x = v0 * s + x0 * c;
                *v = v0 * c - x0 * s;
            }
            for (x, v) in fx.iter_mut().zip(fv.iter_mut()) {
                let (x0, v0) = (*x, *v);
                *x = v0 * s + x0 * c;
                *v = v0 * c - x0 * s;
            }
            remaining -= t;
            segment_time += t;
            let Some((_, first)) = best else { break };
            let mut k = first;
            loop {
                let alpha = 2.0 * fv[k] / cache.denominators[k];
                let dir = if cache.directions.is_empty() { linear[k].normal() } else { &cache.directions[k] };
                for (v, d) in velocity.iter_mut().zip(dir) {
                    *v -= alpha * d;
                }
                for (f, g) in fv.iter_mut().zip(&cache.gram[k * m..(k + 1) * m]) {
                    *f -= alpha * g;
                }
                events.push(HitEvent { time: segment_time, constraint_index: k, factor_index: None, gradient: linear[k].normal().to_vec() });
                if events.len() > BOUNCE_LIMIT {
                    return Err(Error::BounceLimitExceeded { limit: BOUNCE_LIMIT });
                }
                let contact = (0..m).find(|&j| fv[j] < 0.0 && j != k && (fx[j] + cache.offsets[j]).abs() <= CONTACT_TOL);
                match contact {
                    Some(j) => k = j,
                    None => break,
                }
            }
        }
        for (j, l) in linear.iter().enumerate() {
            let v = l.value(&position);
            if !(v >= -FEASIBILITY_TOL) {
                return Err(Error::InfeasibleState { constraint: j, value: v });
            }
        }
        Ok((ParticleState { position, velocity, segment_time }, events))
    }

    /// One iteration from a working-coordinate position.
    pub fn iterate<R: Rng + ?Sized>(&self, position: &[f64], rng: &mut R) -> Result<(Vec<f64>, IterationStats)> {
        let velocity = self.refresh_velocity(rng)?;
        let energy_start = self.energy(position, &velocity)?;
        let (end, events) = self.integrate(ParticleState::new(position.to_vec(), velocity), self.model.travel_time)?;
        let energy_end = self.energy(&end.position, &end.velocity)?;
        Ok((end.position, IterationStats { bounces: events.len(), energy_start, energy_end }))
    }
}

/// Velocity draw for the model's frame.
pub fn refresh_velocity<R: Rng + ?Sized>(model: &TmgModel, rng: &mut R) -> Result<Vec<f64>> {
    HmcSampler::new(model)?.refresh_velocity(rng)
}

/// Integrates a working-coordinate state for the model's travel time.
pub fn integrate_step(model: &TmgModel, state: ParticleState) -> Result<(ParticleState, Vec<HitEvent>)> {
    HmcSampler::new(model)?.integrate(state, model.travel_time)
}

/// One iteration from a working-coordinate position.
pub fn hmc_iteration<R: Rng + ?Sized>(model: &TmgModel, position: &[f64], rng: &mut R) -> Result<(Vec<f64>, IterationStats)> {
    HmcSampler::new(model)?.iterate(position, rng)
}

/// Row-major `n × d` sample storage.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn with_capacity(rows: usize, cols: usize) -> Self {
        Self { rows: 0, cols, data: Vec::with_capacity(rows * cols) }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Output of [`run_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub samples: SampleMatrix,
    pub bounce_counts: Vec<usize>,
    /// `(start, end)` Hamiltonian per emitted iteration
    pub energies: Vec<(f64, f64)>,
    pub seed: u64,
    /// Seconds spent in the sampling loop, as reported by the clock.
    pub wall_clock: f64,
}

impl ChainResult {
    pub fn max_energy_drift(&self) -> f64 {
        self.energies.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn mean_bounces(&self) -> f64 {
        if self.bounce_counts.is_empty() {
            0.0
        } else {
            self.bounce_counts.iter().sum::<usize>() as f64 / self.bounce_counts.len() as f64
        }
    }
}

/// Time source for the sampling loop.
pub trait Clock {
    /// Seconds since an arbitrary origin.
    fn now(&self) -> f64;
}

/// Clock that always reads zero, for `no_std` callers.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

/// Runs `burn_in + n` iterations from `init` (original coordinates) and
/// returns the last `n` positions.
pub fn run_chain(model: &TmgModel, n: usize, burn_in: usize, init: &[f64], seed: u64) -> Result<ChainResult> {
    run_chain_with_clock(model, n, burn_in, init, seed, &NoClock)
}

pub fn run_chain_with_clock(
    model: &TmgModel,
    n: usize,
    burn_in: usize,
    init: &[f64],
    seed: u64,
    clock: &dyn Clock,
) -> Result<ChainResult> {
    model.check_init(init)?;
    let sampler = HmcSampler::new(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = sampler.to_working(init)?;
    let mut samples = SampleMatrix::with_capacity(n, model.dim());
    let mut bounce_counts = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    let start = clock.now();
    for it in 0..burn_in + n {
        let (next, stats) = sampler.iterate(&z, &mut rng)?;
        z = next;
        if it >= burn_in {
            samples.push(&sampler.from_working(&z)?);
            bounce_counts.push(stats.bounces);
            energies.push((stats.energy_start, stats.energy_end));
        }
    }
    let wall_clock = clock.now() - start;
    Ok(ChainResult { samples, bounce_counts, energies, seed, wall_clock })
}
