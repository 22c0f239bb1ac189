use thiserror::Error;

/// Errors shared by every estimation and transformation entry point.
#[derive(Debug, Error)]
pub enum EconoError {
    #[error("malformed numeric cell at row {row}, column {col}: {cell:?}")]
    MalformedCell { row: usize, col: usize, cell: String },

    #[error("periods are not contiguous at row {row}: expected {expected}, found {found}")]
    NonContiguousPeriods { row: usize, expected: String, found: String },

    #[error("duplicate series name {0:?}")]
    DuplicateSeries(String),

    #[error("unknown series {0:?}")]
    UnknownSeries(String),

    #[error("invalid period {0:?}")]
    InvalidPeriod(String),

    #[error("series {name:?} too short: need {needed} observations, have {actual}")]
    SeriesTooShort { name: String, needed: usize, actual: usize },

    #[error("break {0} lies outside the series range")]
    BreakOutsideRange(String),

    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },

    #[error("empty effective sample")]
    EmptySample,

    #[error("design matrix is rank deficient; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),

    #[error("not enough observations: n = {n}, parameters = {k}")]
    TooFewObservations { n: usize, k: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EconoError>;
