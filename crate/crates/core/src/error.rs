use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("range above horizon geometry: slant range {range} m is shorter than platform height {height} m")]
    RangeAboveHorizon { height: f64, range: f64 },

    #[error("dictionary not overcomplete: zoom factor {zoom} < 1")]
    NotOvercomplete { zoom: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("singular system in IRLS update: regularize or prune")]
    SingularIrlsSystem,

    #[error("load covariance before transforming (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("covariance estimate is singular: apply loading")]
    SingularCovariance,

    #[error("zero clutter covariance: cannot calibrate CNR")]
    ZeroClutter,

    #[error("filter output power is zero")]
    ZeroOutputPower,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("range cell {index} out of range (scenario has {count} cells)")]
    RangeIndex { index: usize, count: usize },

    #[error("not enough range cells around test cell {test}: need {needed} training cells, {available} available")]
    InsufficientTraining {
        test: usize,
        needed: usize,
        available: usize,
    },

    #[error("range cell {cell} failed during {stage}: {source}")]
    CellFailure {
        cell: usize,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{dropped} of {total} range cells failed (more than 10%)")]
    TooManyFailures { dropped: usize, total: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn in_cell(self, cell: usize, stage: &'static str) -> Self {
        Error::CellFailure {
            cell,
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit status: 1 for configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::Io { .. } => 1,
            Error::NotOvercomplete { .. } | Error::RangeAboveHorizon { .. } => 1,
            _ => 2,
        }
    }
}
