//! JSON run configurations.
//!
//! A [`RunConfig`] names a model (inline or a demo preset), the sampler and
//! the chain settings. Matrices are nested arrays; the matrix structure is
//! tagged as `{"dense": [[...]]}`, `{"banded": k}` (entries in `matrix`) or
//! `{"toeplitz": [first row]}`. Constraints are tagged as
//! `{"linear": {"F": [...], "g": x}}`, `{"quadratic": {"A": [[...]], "B": [...], "C": x}}`
//! or `{"product": [constraint, ...]}`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tmg_core::constraints::{Constraint, Factor, LinearConstraint, ProductConstraint, QuadraticConstraint};
use tmg_core::engine::{Frame, TmgModel, DEFAULT_TRAVEL_TIME};
use tmg_core::lasso::{generate_lasso_data, LassoData};
use tmg_core::linalg::{BandedMatrix, DenseMatrix, Form, GaussianSpec, StructuredMatrix, ToeplitzMatrix};
use tmg_core::models::{self, BridgeSpec, Kernel, ProbitData, QuantizedGpData};

use crate::demo;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub sampler: SamplerKind,
    pub n_samples: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_travel_time")]
    pub travel_time: f64,
    /// Overrides the model's default frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameName>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

pub fn default_travel_time() -> f64 {
    DEFAULT_TRAVEL_TIME
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    #[default]
    Hmc,
    Gibbs,
    Lasso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameName {
    Canonical,
    General,
}

impl From<FrameName> for Frame {
    fn from(f: FrameName) -> Self {
        match f {
            FrameName::Canonical => Frame::Canonical,
            FrameName::General => Frame::General,
        }
    }
}

/// `"auto"` or an explicit starting point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "InitRepr", into = "InitRepr")]
pub enum InitSpec {
    #[default]
    Auto,
    Point(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum InitRepr {
    Name(String),
    Point(Vec<f64>),
}

impl TryFrom<InitRepr> for InitSpec {
    type Error = String;

    fn try_from(r: InitRepr) -> Result<Self, String> {
        match r {
            InitRepr::Name(s) if s == "auto" => Ok(InitSpec::Auto),
            InitRepr::Name(s) => Err(format!("init must be \"auto\" or an array, got {s:?}")),
            InitRepr::Point(p) => Ok(InitSpec::Point(p)),
        }
    }
}

impl From<InitSpec> for InitRepr {
    fn from(i: InitSpec) -> Self {
        match i {
            InitSpec::Auto => InitRepr::Name("auto".into()),
            InitSpec::Point(p) => InitRepr::Point(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
    /// Defaults to the samples path with extension `.manifest.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// A preset from [`demo::demo_config`].
    Demo(String),
    Gaussian(GaussianModel),
    Probit(ProbitModel),
    ProbitSynthetic { n_obs: usize, data_seed: u64 },
    Bridge { start: f64, barrier: f64, steps: usize, noise_variance: f64 },
    Qgp(QgpModel),
    QgpSynthetic { n: usize, spacing: f64, variance: f64, length_sq: f64, data_seed: u64 },
    Lasso(LassoModelSpec),
    LassoSynthetic { n_obs: usize, n_params: usize, noise_sd: f64, lambda: f64, data_seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormName {
    Precision,
    Covariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureSpec {
    Dense(Vec<Vec<f64>>),
    Banded(usize),
    Toeplitz(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianModel {
    pub form: FormName,
    /// Defaults to dense entries taken from `matrix`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    /// `r` in `-½ xᵀ M x + rᵀ x`; precision form only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_term: Option<Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintSpec {
    Linear {
        #[serde(rename = "F")]
        f: Vec<f64>,
        g: f64,
    },
    Quadratic {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<f64>,
        #[serde(rename = "C")]
        c: f64,
    },
    Product(Vec<ConstraintSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbitModel {
    /// `±1`
    pub labels: Vec<f64>,
    pub regressors: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub prior_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    SquaredExponential { variance: f64, length_sq: f64 },
    White { variance: f64 },
}

impl From<KernelSpec> for Kernel {
    fn from(k: KernelSpec) -> Self {
        match k {
            KernelSpec::SquaredExponential { variance, length_sq } => Kernel::SquaredExponential { variance, length_sq },
            KernelSpec::White { variance } => Kernel::White { variance },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QgpModel {
    pub grid: Vec<f64>,
    pub kernel: KernelSpec,
    /// Finite cut points `z_2 < … < z_K`; the outer levels are unbounded.
    pub cuts: Vec<f64>,
    /// Level index per grid point, `0 ..= cuts.len()`.
    pub observed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoModelSpec {
    /// One regressor row per observation.
    pub z: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub lambda: f64,
    #[serde(default = "one")]
    pub sigma2_init: f64,
}

fn one() -> f64 {
    1.0
}

/// A model ready to sample.
#[derive(Debug, Clone)]
pub enum BuiltModel {
    Tmg {
        model: TmgModel,
        /// Builder-provided start, used for `"auto"`.
        init: Option<Vec<f64>>,
        columns: Vec<String>,
    },
    Lasso {
        data: LassoData,
        lambda: f64,
        sigma2_init: f64,
        columns: Vec<String>,
    },
}

impl BuiltModel {
    pub fn columns(&self) -> &[String] {
        match self {
            BuiltModel::Tmg { columns, .. } | BuiltModel::Lasso { columns, .. } => columns,
        }
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn dense(rows: &[Vec<f64>]) -> CliResult<DenseMatrix> {
    Ok(DenseMatrix::from_rows(rows)?)
}

fn constraint(spec: &ConstraintSpec) -> CliResult<Constraint> {
    Ok(match spec {
        ConstraintSpec::Linear { f, g } => Constraint::Linear(LinearConstraint::new(f.clone(), *g)?),
        ConstraintSpec::Quadratic { a, b, c } => Constraint::Quadratic(QuadraticConstraint::new(dense(a)?, b.clone(), *c)?),
        ConstraintSpec::Product(parts) => {
            let factors = parts
                .iter()
                .map(|p| match constraint(p)? {
                    Constraint::Linear(l) => Ok(Factor::Linear(l)),
                    Constraint::Quadratic(q) => Ok(Factor::Quadratic(q)),
                    Constraint::Product(_) => Err(CliError::config("product factors must be linear or quadratic")),
                })
                .collect::<CliResult<Vec<_>>>()?;
            Constraint::Product(ProductConstraint::new(factors)?)
        }
    })
}

impl GaussianModel {
    pub fn gaussian(&self) -> CliResult<GaussianSpec> {
        let form = match self.form {
            FormName::Precision => Form::Precision,
            FormName::Covariance => Form::Covariance,
        };
        let entries = || self.matrix.as_deref().ok_or_else(|| CliError::config("\"matrix\" is required for this structure"));
        let matrix = match &self.structure {
            None => StructuredMatrix::Dense(dense(entries()?)?),
            Some(StructureSpec::Dense(rows)) => StructuredMatrix::Dense(dense(rows)?),
            Some(StructureSpec::Banded(k)) => StructuredMatrix::Banded(BandedMatrix::from_dense(&dense(entries()?)?, *k)?),
            Some(StructureSpec::Toeplitz(row)) => StructuredMatrix::Toeplitz(ToeplitzMatrix::new(row.clone())?),
        };
        let d = matrix.dim();
        match (form, &self.mean, &self.linear_term) {
            (_, Some(_), Some(_)) => Err(CliError::config("give either \"mean\" or \"linear_term\", not both")),
            (Form::Covariance, _, Some(_)) => Err(CliError::config("\"linear_term\" applies to the precision form only")),
            (Form::Covariance, mean, None) => Ok(GaussianSpec::covariance(matrix, mean.clone().unwrap_or(vec![0.0; d]))?),
            (Form::Precision, None, r) => Ok(GaussianSpec::precision(matrix, r.clone().unwrap_or(vec![0.0; d]))?),
            (Form::Precision, Some(mean), None) => {
                if mean.len() != d {
                    return Err(CliError::config(format!("mean has length {}, expected {d}", mean.len())));
                }
                let r = matrix.mul_vec(mean);
                Ok(GaussianSpec::precision(matrix, r)?)
            }
        }
    }
}

impl ModelSource {
    /// Builds the model. `frame` overrides the builder's default frame.
    pub fn build(&self, frame: Option<Frame>, travel_time: f64) -> CliResult<BuiltModel> {
        let tmg = |model: TmgModel, init: Option<Vec<f64>>, columns: Vec<String>| -> CliResult<BuiltModel> {
            let model = match frame {
                Some(f) => model.with_frame(f),
                None => model,
            };
            Ok(BuiltModel::Tmg { model: model.with_travel_time(travel_time)?, init, columns })
        };
        match self {
            ModelSource::Demo(name) => demo::demo_config(name)?.model.build(frame, travel_time),
            ModelSource::Gaussian(g) => {
                let gaussian = g.gaussian()?;
                let constraints = g.constraints.iter().map(constraint).collect::<CliResult<Vec<_>>>()?;
                let d = gaussian.dim();
                let model = TmgModel::new(gaussian, constraints, Frame::Canonical)?;
                let columns = if d == 2 { vec!["x".into(), "y".into()] } else { numbered("x", d) };
                tmg(model, None, columns)
            }
            ModelSource::Probit(p) => {
                let data = ProbitData::new(p.labels.clone(), p.regressors.clone(), p.prior_variance)?;
                probit(&data, tmg)
            }
            ModelSource::ProbitSynthetic { n_obs, data_seed } => probit(&models::generate_probit(*n_obs, *data_seed)?, tmg),
            ModelSource::Bridge { start, barrier, steps, noise_variance } => {
                let preset = models::build_bridge(&BridgeSpec::new(*start, *barrier, *steps, *noise_variance)?)?;
                let d = preset.model.dim();
                tmg(preset.model, Some(preset.init), numbered("V", d))
            }
            ModelSource::Qgp(q) => {
                let mut thresholds = vec![f64::NEG_INFINITY];
                thresholds.extend(&q.cuts);
                thresholds.push(f64::INFINITY);
                let data = QuantizedGpData {
                    grid: q.grid.clone(),
                    kernel: q.kernel.into(),
                    thresholds,
                    observed: q.observed.clone(),
                };
                qgp(&data, tmg)
            }
            ModelSource::QgpSynthetic { n, spacing, variance, length_sq, data_seed } => {
                let (data, _) = models::generate_quantized_gp(*n, *spacing, *variance, *length_sq, *data_seed)?;
                qgp(&data, tmg)
            }
            ModelSource::Lasso(l) => lasso(LassoData::new(l.z.clone(), l.y.clone())?, l.lambda, l.sigma2_init),
            ModelSource::LassoSynthetic { n_obs, n_params, noise_sd, lambda, data_seed } => {
                let (data, _) = generate_lasso_data(*n_obs, *n_params, *noise_sd, *data_seed)?;
                lasso(data, *lambda, 1.0)
            }
        }
    }
}

fn probit(
    data: &ProbitData,
    tmg: impl Fn(TmgModel, Option<Vec<f64>>, Vec<String>) -> CliResult<BuiltModel>,
) -> CliResult<BuiltModel> {
    let preset = models::build_probit(data, Frame::Canonical)?;
    let mut columns = numbered("beta", data.n_params());
    columns.extend(numbered("w", data.labels().len()));
    tmg(preset.model, Some(preset.init), columns)
}

fn qgp(
    data: &QuantizedGpData,
    tmg: impl Fn(TmgModel, Option<Vec<f64>>, Vec<String>) -> CliResult<BuiltModel>,
) -> CliResult<BuiltModel> {
    let preset = models::build_quantized_gp(data)?;
    for w in preset.model.warnings() {
        eprintln!("warning: {w}");
    }
    tmg(preset.model, Some(preset.init), numbered("y", data.grid.len()))
}

fn lasso(data: LassoData, lambda: f64, sigma2_init: f64) -> CliResult<BuiltModel> {
    if !(lambda > 0.0) || !(sigma2_init > 0.0) {
        return Err(CliError::config("lasso needs positive lambda and sigma2_init"));
    }
    let mut columns = numbered("beta", data.n_params());
    columns.push("sigma2".into());
    Ok(BuiltModel::Lasso { data, lambda, sigma2_init, columns })
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(CliError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.travel_time > 0.0) || !self.travel_time.is_finite() {
            return Err(CliError::config("travel_time must be positive and finite"));
        }
        if let ModelSource::Demo(name) = &self.model {
            demo::demo_config(name)?;
        }
        Ok(())
    }
}
