use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("transmitter and receiver coincide; link distance is zero")]
    ZeroDistance,

    #[error("{function} did not converge within {terms} terms")]
    NonConvergence {
        function: &'static str,
        terms: usize,
    },

    #[error("LoS/LoS and NLoS/NLoS outage curves do not cross in [{lo:e}, {hi:e}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("{}", format_config_error(.line, .field, .message))]
    Config {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

fn format_config_error(line: &Option<usize>, field: &Option<String>, message: &str) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!("line {l}: {f}: {message}"),
        (Some(l), None) => format!("line {l}: {message}"),
        (None, Some(f)) => format!("{f}: {message}"),
        (None, None) => message.to_string(),
    }
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for bad input, 3 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::NoCrossing { .. } => 3,
            _ => 2,
        }
    }
}

/// Returns `value` if it is finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}
