use thiserror::Error;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An enumeration was asked to run beyond its complexity guard.
    #[error("bound {bound} exceeds the enumeration capacity {max}")]
    Capacity { bound: i64, max: i64 },

    /// A caller-supplied argument violates the operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// The homological equation has no solution for a resonant tuple.
    #[error("tuple is resonant (zero divisor); no homological coefficient exists")]
    ResonantTuple,

    /// A polynomial is not homogeneous of even degree with zero momentum.
    #[error("polynomial is not in the zero-momentum homogeneous class: {0}")]
    NotInClass(&'static str),

    /// A reduced-model state lies outside the domain of the square roots.
    #[error("state outside the model domain: {0}")]
    Domain(&'static str),

    /// The adaptive integrator could not make progress.
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },

    /// An orbit did not return within the time cap.
    #[error("no return to the section within t = {cap}")]
    PeriodDetection { cap: f64 },

    /// A root-finder was given an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    /// A feature of the model is only analysed for specific parameters.
    #[error("unsupported regime: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, CoreError>;
