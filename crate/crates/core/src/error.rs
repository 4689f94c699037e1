use std::path::PathBuf;

/// Errors raised by model evaluation, simulation, IO and calibration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate regression: {0}")]
    Degenerate(String),

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed parameter document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical or optimizer failures, as opposed to bad user input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Optimizer(_) | Error::Degenerate(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} is not finite ({value})"
        )))
    }
}
