use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are grouped by what went wrong rather than where: the CLI maps
/// each group onto its own process exit code (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two times, dates or grid points were supplied in the wrong order.
    #[error("ordering error: {0}")]
    Ordering(String),

    /// An argument lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result could not be produced because of floating-point breakdown
    /// (negative variance, singular system, non-finite value).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Historical data needed by a computation is missing.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Malformed or inconsistent user input.
    #[error("input error: {0}")]
    Input(String),

    /// A calibration or root search failed to converge.
    #[error("calibration failed: {message} (best residual {residual:e})")]
    Calibration { message: String, residual: f64 },

    /// A lattice step admits arbitrage (risk-neutral probability outside [0, 1]).
    #[error("arbitrage violation: {0}")]
    Arbitrage(String),

    /// A model object is used before it has been set up for the request.
    #[error("state error: {0}")]
    State(String),

    /// A text file could not be parsed; `line` is 1-based.
    #[error("parse error at {source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A request would exceed a resource limit.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn ordering(msg: impl Into<String>) -> Self {
        Error::Ordering(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Calibration { .. } => 3,
            Error::Domain(_) | Error::Numerical(_) | Error::Arbitrage(_) => 4,
            Error::Capacity(_) => 5,
            Error::Io(_) => 6,
            Error::Ordering(_) | Error::InsufficientData(_) | Error::Input(_) | Error::State(_) => {
                1
            }
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
