use thiserror::Error;

use crate::kernel::Violation;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    /// A series, continued fraction or quadrature did not reach its budget.
    #[error("{what}: achieved error {achieved:e} exceeds target {target:e}")]
    Accuracy {
        what: String,
        achieved: f64,
        target: f64,
    },

    #[error("insufficient precision: need {needed} coefficients, have {available}")]
    Precision { needed: usize, available: usize },

    #[error("parameters violate the theorem hypotheses: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("missing dependency: {0}")]
    Dependency(String),

    /// Two independent evaluation routes disagree beyond the budget.
    #[error("oracle {name} failed: residual {residual:e} > tolerance {tolerance:e}")]
    OracleFailure {
        name: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("serialization: {0}")]
    Serde(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn accuracy(what: impl Into<String>, achieved: f64, target: f64) -> Self {
        Error::Accuracy {
            what: what.into(),
            achieved,
            target,
        }
    }
}
