use thiserror::Error;

/// Errors raised by the evaluators, samplers and estimators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside the domain of {op}")]
    Domain { op: &'static str, name: &'static str, value: f64 },

    #[error("{op}({arg}) overflows double precision")]
    Overflow { op: &'static str, arg: f64 },

    /// theta = 0: the cumulative intensity is identically zero.
    #[error("intensity is identically zero; {0} is undefined")]
    DegenerateIntensity(&'static str),

    /// theta = 0: the count model carries no information about theta.
    #[error("Fisher information vanishes at theta = 0")]
    DegenerateInformation,

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid event times: {0}")]
    InvalidEvents(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("quadrature did not converge: estimate {estimate}, error {abs_error:.3e} > tolerance {tolerance:.3e} after {intervals} intervals")]
    Quadrature { estimate: f64, abs_error: f64, tolerance: f64, intervals: usize },

    #[error("finite-difference step {step} is roundoff dominated: residual grew from {coarse:.3e} to {fine:.3e} when the step was halved")]
    RoundoffDominated { step: f64, coarse: f64, fine: f64 },

    #[error("finite-difference stencil leaves the open light cone at t = {t}, x = {x} (step {step})")]
    StencilOutsideCone { t: f64, x: f64, step: f64 },

    #[error("invalid experiment config:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_nonnegative(op: &'static str, name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { op, name, value })
    }
}

pub(crate) fn check_positive(op: &'static str, name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { op, name, value })
    }
}
