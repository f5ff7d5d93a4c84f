use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability model: {0}")]
    InvalidModel(String),

    #[error("invalid derivative: {0}")]
    InvalidDerivative(String),

    #[error("inconsistent derivative for a pure state: r·∂r = {0:e} (purity cannot change to first order)")]
    InconsistentDerivative(f64),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("F/Q ratio is indeterminate (denominator {0:e})")]
    IndeterminateRatio(f64),

    #[error("integrator step rejected: {0}")]
    StepSize(String),

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("maximum at bracket edge: argmax {argmax} in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, argmax: f64 },

    #[error("fit did not converge: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parameter {
            name,
            reason: format!("must be finite, got {v}"),
        })
    }
}

pub(crate) fn check_nonneg(name: &'static str, v: f64) -> Result<f64> {
    check_finite(name, v)?;
    if v < 0.0 {
        return Err(Error::Parameter {
            name,
            reason: format!("must be >= 0, got {v}"),
        });
    }
    Ok(v)
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<f64> {
    check_finite(name, v)?;
    if v <= 0.0 {
        return Err(Error::Parameter {
            name,
            reason: format!("must be > 0, got {v}"),
        });
    }
    Ok(v)
}
