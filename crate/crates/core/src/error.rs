use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input broke a documented precondition (shape mismatch, bad size, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A t-type statistic had a zero (or non-finite) denominator.
    #[error("degenerate feature: {0}")]
    DegenerateStatistic(String),

    /// The elite set of a cross-entropy update was empty.
    #[error("no elite samples at threshold {threshold}")]
    NoEliteSamples { threshold: f64 },

    #[error("iterative proportional fitting did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    /// The adaptive phase hit `max_iters` before the elite quantile reached the
    /// observed statistic. `p_hat` and `se` come from importance sampling with
    /// the last proposal anyway and are not trustworthy.
    #[error("threshold {gamma} not reached after {} iterations", gamma_trace.len())]
    ThresholdNotReached {
        gamma: f64,
        gamma_trace: Vec<f64>,
        p_hat: f64,
        se: f64,
    },

    #[error("instance too large for exhaustive enumeration: {0}")]
    InstanceTooLarge(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
