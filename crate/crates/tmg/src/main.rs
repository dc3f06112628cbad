use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tmg::bench::{benchmark, BenchmarkConfig};
use tmg::config::{FrameName, InitSpec, ModelSource, Outputs, RunConfig, SamplerKind};
use tmg::diagnose::{diagnose_table, DEFAULT_MAX_LAG};
use tmg::error::{CliError, CliResult};
use tmg::run::{parse_config_document, sample, Manifest};
use tmg::{demo, io};

/// Exact HMC sampling of truncated multivariate Gaussians.
#[derive(Parser)]
#[command(name = "tmg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and write a CSV plus a run manifest.
    Sample(SampleArgs),
    /// ACF, ESF and ESS of columns of a samples CSV.
    Diagnose(DiagnoseArgs),
    /// Compare samplers over repeated runs.
    Benchmark(BenchmarkArgs),
    /// Print a preset run configuration.
    Demo(DemoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Hmc,
    Gibbs,
    Lasso,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Canonical,
    General,
}

#[derive(Args)]
struct SampleArgs {
    /// Run configuration (a manifest is accepted too).
    #[arg(long, conflicts_with = "demo")]
    config: Option<PathBuf>,
    /// Start from a preset instead of a config file.
    #[arg(long)]
    demo: Option<String>,
    #[arg(long = "n-samples", visible_alias = "n")]
    n_samples: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    travel_time: Option<f64>,
    #[arg(long, value_enum)]
    frame: Option<FrameArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// `auto` or comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    /// Samples CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path (default: next to the CSV).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    samples: PathBuf,
    /// Comma-separated column names (default: all).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Sampling CPU time, for ESS per CPU second.
    #[arg(long, conflicts_with = "manifest")]
    cpu_seconds: Option<f64>,
    /// Take the CPU time from a run manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
    max_lag: usize,
    /// Report path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DemoArgs {
    /// One of wedge, ellipses, probit, bridge, qgp, lasso.
    name: String,
    /// Write the config here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_init(s: &str) -> CliResult<InitSpec> {
    if s.trim() == "auto" {
        return Ok(InitSpec::Auto);
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::config(format!("bad init coordinate {v:?}"))))
        .collect::<CliResult<Vec<_>>>()
        .map(InitSpec::Point)
}

fn sample_config(a: SampleArgs) -> CliResult<RunConfig> {
    let mut cfg = match (&a.config, &a.demo) {
        (Some(path), _) => parse_config_document(&io::read_to_string(path)?)?,
        (None, Some(name)) => {
            let mut c = demo::demo_config(name)?;
            // keep the preset by name so the manifest stays short
            c.model = ModelSource::Demo(name.clone());
            c
        }
        (None, None) => return Err(CliError::config("either --config or --demo is required")),
    };
    if let Some(n) = a.n_samples {
        cfg.n_samples = n;
    }
    if let Some(b) = a.burn_in {
        cfg.burn_in = b;
    }
    if let Some(t) = a.travel_time {
        cfg.travel_time = t;
    }
    if let Some(f) = a.frame {
        cfg.frame = Some(match f {
            FrameArg::Canonical => FrameName::Canonical,
            FrameArg::General => FrameName::General,
        });
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(i) = &a.init {
        cfg.init = parse_init(i)?;
    }
    if let Some(s) = a.sampler {
        cfg.sampler = match s {
            SamplerArg::Hmc => SamplerKind::Hmc,
            SamplerArg::Gibbs => SamplerKind::Gibbs,
            SamplerArg::Lasso => SamplerKind::Lasso,
        };
    }
    if a.out.is_some() {
        cfg.outputs = Outputs { samples: a.out, manifest: a.manifest };
    } else if a.manifest.is_some() {
        cfg.outputs.manifest = a.manifest;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => io::write_atomic(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| CliError::runtime(format!("stdout: {e}")))
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample(a) => {
            let cfg = sample_config(a)?;
            let out = sample(&cfg)?;
            let m = &out.manifest;
            eprintln!(
                "wrote {} samples of {} columns in {:.3} s CPU",
                m.n_samples,
                m.columns.len(),
                m.timings.sampling_cpu_seconds
            );
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Diagnose(a) => {
            let table = io::read_samples_csv(&a.samples)?;
            let cpu = match (&a.manifest, a.cpu_seconds) {
                (Some(p), _) => {
                    let m: Manifest = serde_json::from_str(&io::read_to_string(p)?).map_err(CliError::config)?;
                    Some(m.timings.sampling_cpu_seconds)
                }
                (None, c) => c,
            };
            let report = diagnose_table(&table, &a.columns, cpu, a.max_lag)?;
            emit(a.out.as_ref(), &io::to_json_bytes(&report))
        }
        Command::Benchmark(a) => {
            let mut cfg = BenchmarkConfig::from_json(&io::read_to_string(&a.config)?)?;
            if let Some(r) = a.repeats {
                cfg.repeats = r;
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            let report = benchmark(&cfg)?;
            let json = io::to_json_bytes(&report);
            if let Some(p) = a.out.as_ref().or(cfg.outputs.report.as_ref()) {
                io::write_atomic(p, &json)?;
            }
            if a.json {
                emit(None, &json)
            } else {
                emit(None, report.table().as_bytes())
            }
        }
        Command::Demo(a) => {
            let mut text = demo::demo_config(&a.name)?.to_json();
            text.push('\n');
            emit(a.out.as_ref(), text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tmg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
