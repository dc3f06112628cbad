use thiserror::Error;

/// Failures surfaced by the command-line front end, each mapped to an exit
/// code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// The starting point violates a constraint or none could be found (exit 3).
    #[error("infeasible initial point: {0}")]
    Infeasible(String),
    /// The sampler or diagnostics failed while running (exit 4).
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn config(msg: impl std::fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }

    pub fn runtime(msg: impl std::fmt::Display) -> Self {
        CliError::Runtime(msg.to_string())
    }
}

impl From<tmg_core::Error> for CliError {
    fn from(e: tmg_core::Error) -> Self {
        use tmg_core::Error as E;
        match e {
            E::InfeasibleInit { .. } | E::MixedSignProduct { .. } | E::NoInteriorPoint { .. } => {
                CliError::Infeasible(e.to_string())
            }
            E::BounceLimitExceeded { .. }
            | E::EventLimitExceeded { .. }
            | E::InfeasibleState { .. }
            | E::QuarticSolverFailure { .. }
            | E::EmptyConditionalInterval { .. }
            | E::ZeroVariance
            | E::SeriesTooShort { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
