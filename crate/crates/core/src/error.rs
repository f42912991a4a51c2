use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vessel particulars: {0}")]
    InvalidParticulars(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("division-degenerate input: {0}")]
    DegenerateSpeed(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate fit: design matrix is rank deficient (collinear columns: {})", columns.join(", "))]
    DegenerateFit { columns: Vec<String> },

    #[error("incomplete coefficients: missing entry for parameter `{0}`")]
    IncompleteCoefficients(String),

    #[error("theory `{theory}` is outside its validity range: {reason}")]
    Validity { theory: String, reason: String },

    #[error("quadrature did not converge: achieved relative error {achieved:.3e} after {intervals} subintervals")]
    Integration { achieved: f64, intervals: usize },

    #[error("unknown wave theory `{name}` (registered: {})", registered.join(", "))]
    UnknownTheory {
        name: String,
        registered: Vec<String>,
    },

    #[error("model corrupt: {0}")]
    ModelCorrupt(String),

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    TrainingDiverged { epoch: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("records out of order at row {row}: timestamps must be non-decreasing")]
    Ordering { row: usize },

    #[error("invalid fold setup: {0}")]
    Fold(String),

    #[error("MAPE undefined: predicted value at index {0} is zero")]
    MapeUndefined(usize),

    #[error("R2 undefined: actual values are constant")]
    R2Undefined,

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
