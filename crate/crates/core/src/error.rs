use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered {context}")]
    NonFinite { context: String },

    #[error("integrator step size underflow at t = {time:e} s (h = {step:e} s)")]
    StepSizeFailure { time: f64, step: f64 },

    #[error("trace drifted by {deviation:e} at t = {time:e} s")]
    TraceDrift { time: f64, deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unstable resonator: g1*g2 = {g1g2}")]
    UnstableResonator { g1g2: f64 },

    #[error("too few samples: need at least {required}, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("time {time:e} s lies outside the support of the estimate")]
    OutsideSupport { time: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("zero success probability: {0}")]
    ZeroProbability(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Numeric failures (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::StepSizeFailure { .. }
                | Error::TraceDrift { .. }
                | Error::Calibration(_)
                | Error::ZeroProbability(_)
        )
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::invalid(name, format!("{p} is not a probability")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(name, format!("{x} must be positive and finite")));
    }
    Ok(())
}
