use thiserror::Error;

/// Errors raised across the discovery pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory `{id}` has state dimension {found}, expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("degenerate labels: reward entropy is zero, the objective is constant")]
    DegenerateLabels,

    #[error("no success set for KDE seeding")]
    NoSuccessSet,

    #[error(
        "every successful state lies inside a previously found region; \
         use smaller found-region radii or different success labels"
    )]
    PoolExhausted,

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient {
        step: usize,
        trace: Box<crate::optimizer::OptimTrace>,
    },

    #[error("generated success fraction {fraction:.3} outside [0.05, 0.95]; respecify the planted regions")]
    SuccessFraction { fraction: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Machine-readable code used on the command line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::InvalidDataset(_) => "INVALID_DATASET",
            Error::Schema { .. } | Error::Json(_) => "BAD_SCHEMA",
            Error::DegenerateLabels => "DEGENERATE_LABELS",
            Error::NoSuccessSet | Error::PoolExhausted => "SEEDING_FAILURE",
            Error::Stage { source, .. } => source.code(),
            Error::NonFiniteGradient { .. } => "NON_FINITE_GRADIENT",
            Error::SuccessFraction { .. } => "SUCCESS_FRACTION",
            Error::Io(_) => "IO",
        }
    }

    /// Process exit status: 2 input error, 3 degenerate labels, 4 seeding failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::DegenerateLabels => 3,
            Error::NoSuccessSet | Error::PoolExhausted => 4,
            Error::NonFiniteGradient { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
