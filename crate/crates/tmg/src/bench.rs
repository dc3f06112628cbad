//! The `benchmark` command: repeated runs of several samplers on one model,
//! summarized as ESF and ESS/CPU quartiles.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tmg_core::diagnostics::{comparison_rows, summarize_run, BenchSampler, ComparisonRow, Quartiles, RunSummary};

use crate::clock::ThreadCpuClock;
use crate::config::{default_travel_time, BuiltModel, FrameName, InitSpec, ModelSource, Outputs, RunConfig, SamplerKind};
use crate::error::{CliError, CliResult};
use crate::run::{resolve, tmg_init};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub model: ModelSource,
    pub samplers: Vec<SamplerEntry>,
    #[serde(default = "one")]
    pub repeats: usize,
    pub n_samples: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitSpec,
    /// Monitored columns; all when empty.
    #[serde(default)]
    pub columns: Vec<String>,
    #[serde(default)]
    pub outputs: BenchOutputs,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerEntry {
    pub sampler: SamplerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub travel_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SamplerEntry {
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.sampler {
            SamplerKind::Hmc => format!("hmc(T={})", self.travel_time.unwrap_or_else(default_travel_time)),
            SamplerKind::Gibbs => "gibbs".into(),
            SamplerKind::Lasso => "lasso".into(),
        }
    }

    fn bench_sampler(&self) -> CliResult<BenchSampler> {
        match self.sampler {
            SamplerKind::Hmc => Ok(BenchSampler::Hmc {
                travel_time: self.travel_time.unwrap_or_else(default_travel_time),
                frame: self.frame.map(Into::into),
            }),
            SamplerKind::Gibbs => {
                if self.travel_time.is_some() || self.frame.is_some() {
                    return Err(CliError::config("travel_time and frame apply to hmc only"));
                }
                Ok(BenchSampler::Gibbs)
            }
            SamplerKind::Lasso => Err(CliError::config("the lasso sampler cannot be benchmarked")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchOutputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

impl BenchmarkConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: BenchmarkConfig = serde_json::from_str(text).map_err(CliError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.samplers.is_empty() {
            return Err(CliError::config("at least one sampler is required"));
        }
        if self.repeats == 0 {
            return Err(CliError::config("repeats must be at least 1"));
        }
        if self.n_samples < 2 {
            return Err(CliError::config("n_samples must be at least 2 for diagnostics"));
        }
        for s in &self.samplers {
            s.bench_sampler()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl From<Quartiles> for Spread {
    fn from(q: Quartiles) -> Self {
        Spread { q1: q.q1, median: q.median, q3: q.q3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub sampler: String,
    pub column: String,
    pub repeats: usize,
    pub esf: Spread,
    pub ess_per_cpu: Option<Spread>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub n_samples: usize,
    pub burn_in: usize,
    pub repeats: usize,
    pub seed: u64,
    pub threads: usize,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    /// Fixed-width table, one line per sampler and column; entries are
    /// `median (q1/q3)`.
    pub fn table(&self) -> String {
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                let cpu = r.ess_per_cpu.map_or_else(|| "-".into(), |s| spread(s, 1));
                [r.sampler.clone(), r.column.clone(), spread(r.esf, 3), cpu]
            })
            .collect();
        let header = ["sampler", "column", "ESF", "ESS/CPU"];
        let mut width = header.map(str::len);
        for c in &cells {
            for (w, s) in width.iter_mut().zip(c) {
                *w = (*w).max(s.len());
            }
        }
        let mut out = String::new();
        for line in std::iter::once(header.map(String::from)).chain(cells) {
            let _ = writeln!(
                out,
                "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}",
                line[0],
                line[1],
                line[2],
                line[3],
                w0 = width[0],
                w1 = width[1],
                w2 = width[2],
                w3 = width[3]
            );
        }
        out
    }
}

fn spread(s: Spread, digits: usize) -> String {
    format!("{:.d$} ({:.d$}/{:.d$})", s.median, s.q1, s.q3, d = digits)
}

/// Worker count: `TMG_THREADS` if set, else the available parallelism.
pub fn thread_count() -> CliResult<usize> {
    match std::env::var("TMG_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::config(format!("TMG_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn benchmark(config: &BenchmarkConfig) -> CliResult<BenchmarkReport> {
    config.validate()?;
    let run_cfg = RunConfig {
        model: config.model.clone(),
        sampler: SamplerKind::Hmc,
        n_samples: config.n_samples,
        burn_in: config.burn_in,
        travel_time: default_travel_time(),
        frame: None,
        seed: config.seed,
        init: config.init.clone(),
        outputs: Outputs::default(),
    };
    let (built, init) = resolve(&run_cfg)?;
    let BuiltModel::Tmg { model, columns: names, .. } = built else {
        return Err(CliError::config("benchmarks need a Gaussian-type model"));
    };
    let x0 = tmg_init(&model, init)?;
    let monitored: Vec<usize> = if config.columns.is_empty() {
        (0..names.len()).collect()
    } else {
        config
            .columns
            .iter()
            .map(|c| names.iter().position(|n| n == c).ok_or_else(|| CliError::config(format!("no column named {c:?}"))))
            .collect::<CliResult<_>>()?
    };
    let samplers: Vec<BenchSampler> = config.samplers.iter().map(SamplerEntry::bench_sampler).collect::<CliResult<_>>()?;
    let threads = thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(CliError::runtime)?;
    let jobs: Vec<(usize, usize)> =
        (0..samplers.len()).flat_map(|s| (0..config.repeats).map(move |r| (s, r))).collect();
    let summaries: Vec<RunSummary> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, r)| {
                let seed = config.seed.wrapping_add(r as u64);
                let (samples, cpu) =
                    samplers[s].run(&model, config.n_samples, config.burn_in, &x0, seed, &ThreadCpuClock)?;
                Ok(summarize_run(&samples, &monitored, Some(cpu))?)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    for (s, entry) in config.samplers.iter().enumerate() {
        let runs = &summaries[s * config.repeats..(s + 1) * config.repeats];
        let table: Vec<ComparisonRow> = comparison_rows(&entry.label(), &monitored, runs)?;
        rows.extend(table.into_iter().map(|r| ReportRow {
            sampler: r.sampler,
            column: names[r.column].clone(),
            repeats: r.repeats,
            esf: r.esf.into(),
            ess_per_cpu: r.ess_per_cpu.map(Into::into),
        }));
    }
    Ok(BenchmarkReport {
        n_samples: config.n_samples,
        burn_in: config.burn_in,
        repeats: config.repeats,
        seed: config.seed,
        threads,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wedge_bench(samplers: &str, repeats: usize) -> BenchmarkConfig {
        let text = format!(
            r#"{{"model": {{"demo": "wedge"}}, "samplers": {samplers}, "repeats": {repeats},
                "n_samples": 400, "burn_in": 50, "seed": 3, "init": [2, 2.1], "columns": ["y"]}}"#
        );
        BenchmarkConfig::from_json(&text).unwrap()
    }

    #[test]
    fn one_sampler_one_repeat_is_one_row() {
        let r = benchmark(&wedge_bench(r#"[{"sampler": "hmc"}]"#, 1)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].column, "y");
        assert_eq!(r.table().lines().count(), 2);
    }

    #[test]
    fn esf_does_not_depend_on_thread_scheduling() {
        let cfg = wedge_bench(r#"[{"sampler": "hmc"}, {"sampler": "gibbs"}]"#, 4);
        let a = benchmark(&cfg).unwrap();
        let b = benchmark(&cfg).unwrap();
        assert_eq!(a.rows.len(), 2);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.esf, y.esf);
        }
        assert_eq!(a.rows[1].sampler, "gibbs");
    }

    #[test]
    fn invalid_benchmarks_are_config_errors() {
        let bad = [
            r#"{"model": {"demo": "wedge"}, "samplers": [], "n_samples": 10}"#,
            r#"{"model": {"demo": "wedge"}, "samplers": [{"sampler": "lasso"}], "n_samples": 10}"#,
            r#"{"model": {"demo": "wedge"}, "samplers": [{"sampler": "gibbs", "travel_time": 1}], "n_samples": 10}"#,
            r#"{"model": {"demo": "wedge"}, "samplers": [{"sampler": "hmc"}], "n_samples": 10, "repeats": 0}"#,
        ];
        for b in bad {
            assert_eq!(BenchmarkConfig::from_json(b).unwrap_err().exit_code(), 2, "{b}");
        }
    }
}
