use std::path::PathBuf;

use regen_mcmc::{BoundError, EstimatorError, ModelError, RegenError};
use thiserror::Error;

use crate::config::ConfigError;

/// Failure of an experiment command, carrying the process exit status.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model validity: {0}")]
    Model(#[from] ModelError),
    #[error("bound evaluation: {0}")]
    Bound(#[from] BoundError),
    #[error("simulation: {0}")]
    Regen(#[from] RegenError),
    #[error("estimation: {0}")]
    Estimator(#[from] EstimatorError),
    #[error("bound violation detected: {}", .0.join("; "))]
    BoundViolation(Vec<String>),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    /// 2 for configuration errors, 3 for model-validity errors, 4 when a
    /// verification run finds an empirical value above its bound, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Model(_) | Self::Bound(_) => 3,
            Self::Estimator(EstimatorError::Bound(_)) => 3,
            Self::Regen(RegenError::RatioOutOfRange { .. })
            | Self::Estimator(EstimatorError::Regen(RegenError::RatioOutOfRange { .. })) => 3,
            Self::BoundViolation(_) => 4,
            Self::Regen(_) | Self::Estimator(_) | Self::Io { .. } | Self::Csv(_) => 1,
        }
    }
}
