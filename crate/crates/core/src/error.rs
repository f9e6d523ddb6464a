use thiserror::Error;

/// Errors raised while building or running a rotor model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates a geometric or physical invariant. `field` names the
    /// offending quantity using the same dotted path as the scenario file.
    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    /// The numerical problem is ill-posed (singular matrix, non-convergence).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical(message.into())
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with a validation error unless `value` is finite and strictly positive.
pub(crate) fn require_positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive (got {value})")))
    }
}

/// Fails with a validation error unless `value` is finite and non-negative.
pub(crate) fn require_non_negative(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be non-negative (got {value})"),
        ))
    }
}
