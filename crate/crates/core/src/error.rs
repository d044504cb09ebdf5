use thiserror::Error;

/// Errors raised by the statistics, calibration and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dispersion statistic is undefined because the sample mean is zero.
    #[error("dispersion statistic undefined: sample mean is zero")]
    UndefinedStatistic,

    /// The Poisson MLE is zero, so no partition can be built from it.
    #[error("degenerate Poisson MLE: sample mean is zero")]
    DegenerateMle,

    /// The requested quantity has no closed form for this alternative.
    #[error("unsupported alternative for {operation}: {spec}")]
    UnsupportedSpec {
        operation: &'static str,
        spec: String,
    },

    /// A series failed to reach its tail tolerance.
    #[error("series did not converge within {terms} terms (remaining tail {tail:e})")]
    NonConvergence { terms: usize, tail: f64 },

    /// Moment matching could not bracket a root.
    #[error("calibration failed: {reason} (scanned {parameter} over [{lo}, {hi}])")]
    CalibrationFailure {
        reason: String,
        parameter: &'static str,
        lo: f64,
        hi: f64,
    },

    /// Too many Monte Carlo replications produced undefined statistics.
    #[error("{failed} of {total} replications failed, above the 1% limit")]
    TooManyFailures { failed: usize, total: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
