//! The `sample` command: build, run, write.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tmg_core::engine::{run_chain_with_clock, ChainResult, SampleMatrix, TmgModel};
use tmg_core::gibbs::run_gibbs_with_clock;
use tmg_core::lasso::run_lasso_chain;

use crate::clock::{thread_cpu_seconds, ThreadCpuClock};
use crate::config::{BuiltModel, InitSpec, ModelSource, RunConfig, SamplerKind};
use crate::demo;
use crate::error::{CliError, CliResult};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Thread CPU time of the sampling loop (burn-in included).
    pub sampling_cpu_seconds: f64,
    /// Wall time from config to finished samples.
    pub total_wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStats {
    pub mean: f64,
    pub max: usize,
    pub total: usize,
}

impl EventStats {
    fn from_counts(counts: &[usize]) -> Self {
        let total: usize = counts.iter().sum();
        let mean = if counts.is_empty() { 0.0 } else { total as f64 / counts.len() as f64 };
        Self { mean, max: counts.iter().copied().max().unwrap_or(0), total }
    }
}

/// Written next to the samples CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: RunConfig,
    pub seed: u64,
    pub n_samples: usize,
    pub burn_in: usize,
    pub columns: Vec<String>,
    pub init: Vec<f64>,
    pub timings: Timings,
    /// Wall bounces per emitted iteration (HMC only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounces: Option<EventStats>,
    /// Sign flips per emitted iteration (Lasso only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flips: Option<EventStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_energy_drift: Option<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Either a bare config or a manifest whose `config` is re-run.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigDocument {
    Run(RunConfig),
    Manifest(Box<Manifest>),
}

/// Parses a config file, accepting manifests as well.
pub fn parse_config_document(text: &str) -> CliResult<RunConfig> {
    let doc: ConfigDocument = serde_json::from_str(text).map_err(|_| {
        // report the error against the plain schema, which is what users write
        match serde_json::from_str::<RunConfig>(text) {
            Err(e) => CliError::config(e),
            Ok(_) => CliError::config("unrecognized config document"),
        }
    })?;
    let cfg = match doc {
        ConfigDocument::Run(c) => c,
        ConfigDocument::Manifest(m) => m.config,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub columns: Vec<String>,
    pub samples: SampleMatrix,
    pub manifest: Manifest,
}

/// Model with the demo indirection resolved, plus the start used for
/// `"auto"`.
pub fn resolve(config: &RunConfig) -> CliResult<(BuiltModel, Option<Vec<f64>>)> {
    let frame = config.frame.map(Into::into);
    let (source, demo_init) = match &config.model {
        ModelSource::Demo(name) => {
            let d = demo::demo_config(name)?;
            let init = match d.init {
                InitSpec::Point(p) => Some(p),
                InitSpec::Auto => None,
            };
            (d.model, init)
        }
        other => (other.clone(), None),
    };
    let built = source.build(frame, config.travel_time)?;
    let init = match &config.init {
        InitSpec::Point(p) => Some(p.clone()),
        InitSpec::Auto => demo_init.or_else(|| match &built {
            BuiltModel::Tmg { init, .. } => init.clone(),
            BuiltModel::Lasso { .. } => None,
        }),
    };
    Ok((built, init))
}

pub(crate) fn tmg_init(model: &TmgModel, init: Option<Vec<f64>>) -> CliResult<Vec<f64>> {
    let x = match init {
        Some(x) => x,
        None => model.find_interior_point()?,
    };
    if x.len() != model.dim() {
        return Err(CliError::config(format!("init has length {}, model dimension is {}", x.len(), model.dim())));
    }
    model.check_init(&x)?;
    Ok(x)
}

/// Runs the configured chain without touching the filesystem.
pub fn run(config: &RunConfig) -> CliResult<RunOutput> {
    let wall = Instant::now();
    config.validate()?;
    let (built, init) = resolve(config)?;
    let columns = built.columns().to_vec();
    let n = config.n_samples;
    let mut manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        seed: config.seed,
        n_samples: n,
        burn_in: config.burn_in,
        columns: columns.clone(),
        init: Vec::new(),
        timings: Timings { sampling_cpu_seconds: 0.0, total_wall_seconds: 0.0 },
        bounces: None,
        flips: None,
        max_energy_drift: None,
        warnings: Vec::new(),
    };
    let samples = match (config.sampler, built) {
        (SamplerKind::Hmc | SamplerKind::Gibbs, BuiltModel::Tmg { model, .. }) => {
            let x0 = tmg_init(&model, init)?;
            manifest.warnings = model.warnings().iter().map(|w| w.to_string()).collect();
            let r: ChainResult = if config.sampler == SamplerKind::Hmc {
                run_chain_with_clock(&model, n, config.burn_in, &x0, config.seed, &ThreadCpuClock)?
            } else {
                run_gibbs_with_clock(&model, n, config.burn_in, &x0, config.seed, &ThreadCpuClock)?
            };
            manifest.init = x0;
            manifest.timings.sampling_cpu_seconds = r.wall_clock;
            if config.sampler == SamplerKind::Hmc {
                manifest.bounces = Some(EventStats::from_counts(&r.bounce_counts));
                manifest.max_energy_drift = Some(r.max_energy_drift());
            }
            r.samples
        }
        (SamplerKind::Lasso, BuiltModel::Lasso { data, lambda, sigma2_init, .. }) => {
            let d = data.n_params();
            let beta0 = match init {
                Some(b) if b.len() == d => b,
                Some(b) => return Err(CliError::config(format!("init has length {}, expected {d}", b.len()))),
                None => vec![0.0; d],
            };
            let t0 = thread_cpu_seconds();
            let chain = run_lasso_chain(&data, lambda, n, config.burn_in, &beta0, sigma2_init, config.seed)?;
            manifest.timings.sampling_cpu_seconds = thread_cpu_seconds() - t0;
            manifest.flips = Some(EventStats::from_counts(&chain.flips));
            manifest.max_energy_drift = Some(chain.max_energy_drift);
            manifest.init = beta0;
            let mut m = SampleMatrix::with_capacity(n, d + 1);
            let mut row = Vec::with_capacity(d + 1);
            for (b, s2) in chain.beta.iter_rows().zip(&chain.sigma2) {
                row.clear();
                row.extend_from_slice(b);
                row.push(*s2);
                m.push(&row);
            }
            m
        }
        (SamplerKind::Lasso, _) => return Err(CliError::config("the lasso sampler needs a lasso model")),
        (_, BuiltModel::Lasso { .. }) => return Err(CliError::config("lasso models need sampler \"lasso\"")),
    };
    manifest.timings.total_wall_seconds = wall.elapsed().as_secs_f64();
    Ok(RunOutput { columns, samples, manifest })
}

/// Runs and writes the samples CSV and manifest. Nothing is written unless
/// the whole run succeeds.
pub fn sample(config: &RunConfig) -> CliResult<RunOutput> {
    let samples_path = config.outputs.samples.clone().ok_or_else(|| CliError::config("no samples output path given"))?;
    let manifest_path: PathBuf = config.outputs.manifest.clone().unwrap_or_else(|| io::default_manifest_path(&samples_path));
    let out = run(config)?;
    let csv = io::samples_csv(&out.columns, out.samples.iter_rows())?;
    let json = io::to_json_bytes(&out.manifest);
    io::write_atomic(&samples_path, &csv)?;
    io::write_atomic(&manifest_path, &json)?;
    Ok(out)
}
