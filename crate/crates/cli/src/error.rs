use std::path::PathBuf;

use msland_core::actuarial::ActuarialError;
use msland_core::estimate::EstimateError;
use msland_core::model::ModelError;
use msland_core::simulate::SimulateError;
use msland_core::volterra::VolterraError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}: no individuals", path.display())]
    NoIndividuals { path: PathBuf },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("missing input: {0}")]
    MissingInput(&'static str),
    #[error("bivariate grid for landmark `{landmark}` has {cells} cells, above the limit of {limit} (raise max_cells_2d or set bivariate = false)")]
    GridTooLarge {
        landmark: String,
        cells: usize,
        limit: usize,
    },
    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Volterra(#[from] VolterraError),
    #[error(transparent)]
    Actuarial(#[from] ActuarialError),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for a failed validation, 2 for anything wrong with the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Format { .. } => "format",
            CliError::NoIndividuals { .. } => "no_individuals",
            CliError::Config(_) => "config",
            CliError::MissingInput(_) => "missing_input",
            CliError::GridTooLarge { .. } => "grid_too_large",
            CliError::ValidationFailed { .. } => "validation_failed",
            CliError::Model(_) => "model",
            CliError::Simulate(_) => "simulate",
            CliError::Estimate(EstimateError::AtRisk { .. }) => "at_risk",
            CliError::Estimate(_) => "estimate",
            CliError::Volterra(_) => "volterra",
            CliError::Actuarial(ActuarialError::Estimate(EstimateError::AtRisk { .. })) => "at_risk",
            CliError::Actuarial(_) => "actuarial",
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (file, line) = match self {
            CliError::Parse { path, line, .. } => (Some(path.display().to_string()), Some(*line)),
            CliError::Io { path, .. } | CliError::Format { path, .. } | CliError::NoIndividuals { path } => {
                (Some(path.display().to_string()), None)
            }
            _ => (None, None),
        };
        ErrorReport {
            kind: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
            file,
            line,
        }
    }
}

/// Machine-readable form of a failure, printed as JSON on stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}
