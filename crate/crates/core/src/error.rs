use thiserror::Error;

/// Errors raised by the numerical and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Log-gamma evaluated at a nonpositive integer.
    #[error("gamma pole at {0}")]
    Pole(f64),

    /// An argument lies outside the supported domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration guard was exceeded.
    #[error("size limit exceeded: {what} = {value} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    /// A series or quadrature did not reach the requested accuracy.
    #[error("accuracy error in {context}: attained {attained:e}")]
    Accuracy { context: &'static str, attained: f64 },

    /// Parameters do not belong to any of the probability-measure series.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Sampler configuration cannot meet its truncation contract.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
