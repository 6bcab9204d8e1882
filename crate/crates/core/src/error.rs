use std::path::PathBuf;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive numerical routine ran out of budget before meeting its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A moment of the requested order does not exist for these parameters.
    #[error("moment of order {order} does not exist (requires {order} < {limit})")]
    MomentDoesNotExist { order: u32, limit: f64 },

    /// The model degenerates to one of its limits (a zero noise amplitude).
    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    /// The data carry no usable signal (e.g. all-zero returns).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A simulated variance path crossed its overflow cap.
    #[error("variance overflow at step {step}: v = {value:e} exceeds cap {cap:e}")]
    Overflow { step: usize, value: f64, cap: f64 },

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from user-supplied input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::DegenerateModel(_)
                | Error::InvalidConfig(_)
                | Error::Parse { .. }
                | Error::MomentDoesNotExist { .. }
                | Error::InsufficientData { .. }
        )
    }
}
