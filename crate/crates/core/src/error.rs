use std::path::PathBuf;

/// Errors raised by the analysis toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited input: {0}")]
    Csv(String),
    #[error("duplicate {kind} label {label:?}")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("non-numeric cell {value:?} at row {row}, indicator {indicator:?}")]
    NonNumeric {
        row: usize,
        indicator: String,
        value: String,
    },
    #[error("table too small: {0}")]
    TooSmall(String),
    #[error("all-missing column for indicator {0:?}")]
    AllMissingColumn(String),
    #[error("missing value in indicator {0:?}; impute first")]
    MissingValues(String),
    #[error("zero-variance indicator {0:?}")]
    ZeroVariance(String),
    #[error("table must be standardized")]
    NotStandardized,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at {0}")]
    NonFinite(String),
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("retained component count not selected")]
    ComponentsNotSelected,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error: 2 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } | Error::NonFinite(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
