//! Crate-wide error type. Validation failures name the offending field so
//! CLI users and scenario authors can fix their input without reading code.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A math function was called outside its domain.
    #[error("domain error in {func}: {value} is outside {domain}")]
    Domain {
        func: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A parameter, scenario field, or argument failed validation.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// An override or sweep referenced a parameter that does not exist.
    #[error("unknown parameter: {0}")]
    UnknownParameter(String),

    /// A key=value override could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
