//! Autocorrelations, effective sample factor and effective sample size for
//! scalar chains.

use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{run_chain_with_clock, Clock, Frame, SampleMatrix, TmgModel};
use crate::gibbs::run_gibbs_with_clock;
use crate::{Error, Result};

/// The ESF window stops at the first lag whose autocorrelation drops below
/// this value.
pub const ACF_CUTOFF: f64 = 0.001;

/// Scalar chain with optional sampling time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries {
    values: Vec<f64>,
    cpu_seconds: Option<f64>,
}

impl ScalarSeries {
    pub fn new(values: Vec<f64>, cpu_seconds: Option<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort { len: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("series values must be finite"));
        }
        Ok(Self { values, cpu_seconds })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cpu_seconds(&self) -> Option<f64> {
        self.cpu_seconds
    }
}

/// Per-series summary.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// `ρ_1 .. ρ_L`
    pub acf: Vec<f64>,
    pub esf: f64,
    pub ess: f64,
    pub ess_per_cpu: Option<f64>,
}

/// Demeaned copy and lag-0 sum of squares.
struct Centered {
    dev: Vec<f64>,
    c0: f64,
}

impl Centered {
    fn new(values: &[f64]) -> Result<Self> {
        let m = values.len();
        if m < 2 {
            return Err(Error::SeriesTooShort { len: m });
        }
        let mean = values.iter().sum::<f64>() / m as f64;
        let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let c0: f64 = dev.iter().map(|d| d * d).sum();
        if !(c0 > 0.0) || values.iter().all(|v| *v == values[0]) {
            return Err(Error::ZeroVariance);
        }
        Ok(Self { dev, c0 })
    }

    fn rho(&self, j: usize) -> f64 {
        let d = &self.dev;
        let s: f64 = d[..d.len() - j].iter().zip(&d[j..]).map(|(a, b)| a * b).sum();
        s / self.c0
    }
}

/// Sample autocorrelations `ρ_1 .. ρ_max_lag`, each normalized by the lag-0
/// sum of squares (the usual biased estimator).
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= values.len() {
        return Err(Error::InvalidArgument("max_lag must be smaller than the series length"));
    }
    let c = Centered::new(values)?;
    Ok((1..=max_lag).map(|j| c.rho(j)).collect())
}

/// `[1 + 2 Σ_{j=1}^{J} (1 - j/m) ρ_j]⁻¹`, with `J` the first lag where
/// `ρ_J < ACF_CUTOFF` or `J = m/2`. If that denominator is not positive the
/// full window `J = m - 1` is used instead.
pub fn esf(values: &[f64]) -> Result<f64> {
    let c = Centered::new(values)?;
    let m = values.len();
    let weight = |j: usize| 1.0 - j as f64 / m as f64;
    let mut sum = 0.0;
    let limit = (m / 2).max(1);
    for j in 1..=limit {
        let r = c.rho(j);
        sum += weight(j) * r;
        if r < ACF_CUTOFF {
            break;
        }
    }
    let mut denom = 1.0 + 2.0 * sum;
    if !(denom > 0.0) {
        denom = 1.0 + 2.0 * (1..m).map(|j| weight(j) * c.rho(j)).sum::<f64>();
    }
    if !(denom > 0.0) {
        return Err(Error::InvalidArgument("autocorrelation sum is not positive"));
    }
    Ok(1.0 / denom)
}

/// `m × esf`
pub fn ess(values: &[f64]) -> Result<f64> {
    Ok(values.len() as f64 * esf(values)?)
}

/// ACF up to `max_lag` plus ESF/ESS (and ESS per CPU second when given).
pub fn diagnose(series: &ScalarSeries, max_lag: usize) -> Result<DiagnosticsReport> {
    let values = series.values();
    let max_lag = max_lag.min(values.len() - 1);
    let acf = acf(values, max_lag)?;
    let esf = esf(values)?;
    let ess = values.len() as f64 * esf;
    let ess_per_cpu = series.cpu_seconds.filter(|t| *t > 0.0).map(|t| ess / t);
    Ok(DiagnosticsReport { acf, esf, ess, ess_per_cpu })
}

/// First quartile, median and third quartile (linear interpolation between
/// order statistics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = libm::floor(h) as usize;
        let hi = (lo + 1).min(v.len() - 1);
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Some(Quartiles { q1: q(0.25), median: q(0.5), q3: q(0.75) })
}

/// Mean and its naive standard error (no autocorrelation correction).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, libm::sqrt(var / m))
}

/// ESF and ESS per CPU second of selected columns in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub esf: Vec<f64>,
    pub ess_per_cpu: Vec<Option<f64>>,
}

pub fn summarize_run(samples: &SampleMatrix, columns: &[usize], cpu_seconds: Option<f64>) -> Result<RunSummary> {
    let mut esf_out = Vec::with_capacity(columns.len());
    let mut per_cpu = Vec::with_capacity(columns.len());
    for &j in columns {
        if j >= samples.cols() {
            return Err(Error::InvalidArgument("monitored column out of range"));
        }
        let series = ScalarSeries::new(samples.column(j), cpu_seconds)?;
        let e = esf(series.values())?;
        esf_out.push(e);
        per_cpu.push(cpu_seconds.filter(|t| *t > 0.0).map(|t| e * series.len() as f64 / t));
    }
    Ok(RunSummary { esf: esf_out, ess_per_cpu: per_cpu })
}

/// One line of a comparison table: a sampler and a monitored column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub sampler: String,
    pub column: usize,
    pub repeats: usize,
    pub esf: Quartiles,
    /// Missing when no run carried a CPU time.
    pub ess_per_cpu: Option<Quartiles>,
}

/// Collapses repeated runs of one sampler into per-column quartiles.
pub fn comparison_rows(sampler: &str, columns: &[usize], runs: &[RunSummary]) -> Result<Vec<ComparisonRow>> {
    if runs.is_empty() {
        return Err(Error::InvalidArgument("at least one repeat is required"));
    }
    let mut rows = Vec::with_capacity(columns.len());
    for (k, &column) in columns.iter().enumerate() {
        let esfs: Vec<f64> = runs.iter().map(|r| r.esf[k]).collect();
        let cpu: Vec<f64> = runs.iter().filter_map(|r| r.ess_per_cpu[k]).collect();
        rows.push(ComparisonRow {
            sampler: sampler.into(),
            column,
            repeats: runs.len(),
            esf: quartiles(&esfs).expect("non-empty"),
            ess_per_cpu: quartiles(&cpu),
        });
    }
    Ok(rows)
}

/// A sampler entry of a benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchSampler {
    Hmc { travel_time: f64, frame: Option<Frame> },
    Gibbs,
}

impl BenchSampler {
    /// Runs one chain; `cpu` is `Some` only when the clock is real.
    pub fn run(
        &self,
        model: &TmgModel,
        n: usize,
        burn_in: usize,
        init: &[f64],
        seed: u64,
        clock: &dyn Clock,
    ) -> Result<(SampleMatrix, f64)> {
        let r = match *self {
            BenchSampler::Hmc { travel_time, frame } => {
                let mut m = model.clone().with_travel_time(travel_time)?;
                if let Some(f) = frame {
                    m = m.with_frame(f);
                }
                run_chain_with_clock(&m, n, burn_in, init, seed, clock)?
            }
            BenchSampler::Gibbs => run_gibbs_with_clock(model, n, burn_in, init, seed, clock)?,
        };
        Ok((r.samples, r.wall_clock))
    }
}

/// Runs every sampler `repeats` times (seed `seed + r` for repeat `r`) and
/// tabulates ESF and ESS/CPU quartiles for the monitored columns.
#[allow(clippy::too_many_arguments)]
pub fn benchmark(
    model: &TmgModel,
    samplers: &[(String, BenchSampler)],
    n: usize,
    burn_in: usize,
    repeats: usize,
    seed: u64,
    init: &[f64],
    columns: &[usize],
    clock: &dyn Clock,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for (label, s) in samplers {
        let mut runs = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let (samples, cpu) = s.run(model, n, burn_in, init, seed.wrapping_add(r as u64), clock)?;
            runs.push(summarize_run(&samples, columns, Some(cpu))?);
        }
        rows.extend(comparison_rows(label, columns, &runs)?);
    }
    Ok(rows)
}
