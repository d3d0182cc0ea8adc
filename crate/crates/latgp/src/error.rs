use thiserror::Error;

/// Errors produced by the latgp toolkit.
#[derive(Debug, Error)]
pub enum LatGpError {
    /// A configuration or data value violates an invariant.
    #[error("{0}")]
    Validation(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty network")]
    EmptyNetwork,

    #[error("no samples")]
    NoSamples,

    /// A CSV row failed to parse or validate.
    #[error("row {row}: {message}")]
    CsvRow { row: usize, message: String },

    #[error("kernel matrix not positive definite")]
    NotPositiveDefinite,

    /// A leave-one-out fold failed to fit.
    #[error("fold {fold} failed to fit: {source}")]
    FoldFitFailure {
        fold: usize,
        source: Box<LatGpError>,
    },

    /// Every grid point failed during hyperparameter selection.
    #[error("all {count} grid points failed to fit; first failure: {first}")]
    GridSearchFailed { count: usize, first: String },

    #[error("unsupported model version: expected {expected:?}, found {found:?}")]
    ModelVersion { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LatGpError>;

impl LatGpError {
    /// Whether the error is a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LatGpError::NotPositiveDefinite
                | LatGpError::FoldFitFailure { .. }
                | LatGpError::GridSearchFailed { .. }
        )
    }
}
