use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A scalar argument lies outside the domain of the function.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    Domain { name: &'static str, value: f64, min: f64, max: f64 },

    /// The dense oracle would need more memory than the configured cap allows.
    #[error("n = {n} exceeds the dense-storage cap of {max} sites")]
    Capacity { n: usize, max: usize },

    /// The requested chain is outside what an engine can solve.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The computation hit a numerical inconsistency beyond tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A two-site density matrix does not have the parity/translation pattern.
    #[error("matrix entry ({row}, {col}) has magnitude {magnitude:e}, breaking the parity-symmetric pattern")]
    Structure { row: usize, col: usize, magnitude: f64 },

    /// The input makes the requested quantity undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Two engines disagreed on the same configuration.
    #[error("engines disagree by {deviation:e} at t = {t}")]
    EngineMismatch { t: f64, deviation: f64 },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by malformed arguments rather than by the
    /// configuration being outside an engine's reach.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Domain { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `value` against `[min, max]`, clamping anything within `slack` of the edges.
pub(crate) fn clamp_domain(name: &'static str, value: f64, min: f64, max: f64, slack: f64) -> Result<f64> {
    if !value.is_finite() || value < min - slack || value > max + slack {
        return Err(Error::Domain { name, value, min, max });
    }
    Ok(value.clamp(min, max))
}
