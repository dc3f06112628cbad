//! Preset run configurations for the example models.

use tmg_core::constraints::{Constraint, Factor};
use tmg_core::engine::TmgModel;
use tmg_core::linalg::{Form, StructuredMatrix};
use tmg_core::models;

use crate::config::{
    default_travel_time, ConstraintSpec, FormName, GaussianModel, InitSpec, ModelSource, Outputs, RunConfig, SamplerKind,
    StructureSpec,
};
use crate::error::{CliError, CliResult};

pub const DEMO_NAMES: [&str; 6] = ["wedge", "ellipses", "probit", "bridge", "qgp", "lasso"];

/// Default grid spacing of the quantized GP preset.
pub const QGP_SPACING: f64 = 0.05;

fn config(model: ModelSource, sampler: SamplerKind, n_samples: usize, burn_in: usize, init: InitSpec) -> RunConfig {
    RunConfig {
        model,
        sampler,
        n_samples,
        burn_in,
        travel_time: default_travel_time(),
        frame: None,
        seed: 1,
        init,
        outputs: Outputs::default(),
    }
}

/// Preset configuration by name.
pub fn demo_config(name: &str) -> CliResult<RunConfig> {
    Ok(match name {
        "wedge" => {
            let p = models::wedge()?;
            config(inline(&p.model)?, SamplerKind::Hmc, 8000, 2000, InitSpec::Point(p.init))
        }
        "ellipses" => {
            let p = models::ellipses()?;
            config(inline(&p.model)?, SamplerKind::Hmc, 6000, 500, InitSpec::Point(p.init))
        }
        "probit" => config(ModelSource::ProbitSynthetic { n_obs: 800, data_seed: 1 }, SamplerKind::Hmc, 6000, 2000, InitSpec::Auto),
        "bridge" => config(
            ModelSource::Bridge { start: -40.0, barrier: -20.0, steps: 100, noise_variance: 1.0 },
            SamplerKind::Hmc,
            15_000,
            500,
            InitSpec::Auto,
        ),
        "qgp" => config(
            ModelSource::QgpSynthetic { n: 200, spacing: QGP_SPACING, variance: 0.6, length_sq: 0.2, data_seed: 1 },
            SamplerKind::Hmc,
            5000,
            500,
            InitSpec::Auto,
        ),
        "lasso" => config(
            ModelSource::LassoSynthetic { n_obs: 100, n_params: 8, noise_sd: 3.0, lambda: 1.0, data_seed: 1 },
            SamplerKind::Lasso,
            5000,
            500,
            InitSpec::Auto,
        ),
        _ => return Err(CliError::config(format!("unknown demo {name:?}; expected one of {}", DEMO_NAMES.join(", ")))),
    })
}

fn factor_spec(f: &Factor) -> ConstraintSpec {
    match f {
        Factor::Linear(l) => ConstraintSpec::Linear { f: l.normal().to_vec(), g: l.offset() },
        Factor::Quadratic(q) => ConstraintSpec::Quadratic { a: q.a().rows(), b: q.b().to_vec(), c: q.c() },
    }
}

/// Writes a dense or structured model back out as an inline specification.
pub fn inline(model: &TmgModel) -> CliResult<ModelSource> {
    let g = model.gaussian();
    let (structure, matrix) = match g.matrix() {
        StructuredMatrix::Dense(m) => (StructureSpec::Dense(m.rows()), None),
        StructuredMatrix::Banded(b) => (StructureSpec::Banded(b.bandwidth()), Some(b.to_dense().rows())),
        StructuredMatrix::Toeplitz(t) => (StructureSpec::Toeplitz(t.first_row().to_vec()), None),
        StructuredMatrix::Regression(r) => (StructureSpec::Dense(r.to_dense().rows()), None),
    };
    let (form, mean, linear_term) = match g.form() {
        Form::Covariance => (FormName::Covariance, Some(g.mean().to_vec()), None),
        Form::Precision => (FormName::Precision, None, Some(g.linear_term().to_vec())),
    };
    let constraints = model
        .constraints()
        .iter()
        .map(|c| match c {
            Constraint::Linear(l) => factor_spec(&Factor::Linear(l.clone())),
            Constraint::Quadratic(q) => factor_spec(&Factor::Quadratic(q.clone())),
            Constraint::Product(p) => ConstraintSpec::Product(p.factors().iter().map(factor_spec).collect()),
        })
        .collect();
    Ok(ModelSource::Gaussian(GaussianModel { form, structure: Some(structure), matrix, mean, linear_term, constraints }))
}
