use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A statistic could not be evaluated for a specific observation.
    #[error("evaluation failed at observation {index}: {reason}")]
    Evaluation { index: usize, reason: String },

    /// A statistic could not be evaluated (not tied to one observation).
    #[error("evaluation failed: {0}")]
    Numerical(String),

    /// The optimizer exhausted its budget. `best` is the best point found.
    #[error("optimizer did not converge after {iterations} iterations (best objective {best_value})")]
    NonConvergence {
        iterations: usize,
        best: Vec<f64>,
        best_value: f64,
    },

    /// A posterior sampler could not be initialized or failed mid-run.
    #[error("sampler error: {0}")]
    Sampler(String),

    /// Experiment configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// The model does not provide the requested capability.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
