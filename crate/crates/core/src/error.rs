use std::path::PathBuf;

use thiserror::Error;

use crate::model::SimulatedPath;

/// Errors raised by the model, filter, estimator and statistics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sentiment collapse at step {step}: bullishness {bullishness:e} fell below the floor")]
    Collapse {
        step: usize,
        bullishness: f64,
        partial: Option<Box<SimulatedPath>>,
    },

    #[error("numerical divergence at step {step}: {quantity} is non-finite or out of range")]
    Divergence {
        step: usize,
        quantity: &'static str,
        partial: Option<Box<SimulatedPath>>,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("non-finite return at index {index}")]
    NonFiniteReturn { index: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined variance: series is constant")]
    ConstantSeries,

    #[error("non-finite log-likelihood when perturbing `{parameter}`")]
    NonFiniteGradient { parameter: &'static str },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Step index for collapse/divergence failures.
    pub fn step(&self) -> Option<usize> {
        match self {
            Error::Collapse { step, .. } | Error::Divergence { step, .. } => Some(*step),
            _ => None,
        }
    }

    /// Partial path carried by a failed simulation.
    pub fn partial_path(&self) -> Option<&SimulatedPath> {
        match self {
            Error::Collapse { partial, .. } | Error::Divergence { partial, .. } => {
                partial.as_deref()
            }
            _ => None,
        }
    }
}
