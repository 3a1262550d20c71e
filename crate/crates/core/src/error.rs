use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed row {row}: {message}")]
    MalformedRow { row: u64, message: String },

    #[error("header does not match schema: {0}")]
    Header(String),

    #[error("duplicate coin-day rows: {}", format_offenders(.0))]
    DuplicateCoinDay(Vec<(String, NaiveDate)>),

    #[error("authentication rejected by the history API (HTTP {status})")]
    Auth { status: u16 },

    #[error("rate limit still exceeded after {attempts} attempts")]
    RateLimitExhausted { attempts: u32 },

    #[error("http error: {0}")]
    Http(String),

    #[error("response payload is missing field `{field}`")]
    SchemaDrift { field: String },

    #[error("column `{0}` has no present values")]
    AllAbsent(String),

    #[error("column is constant; standard deviation is zero")]
    ConstantColumn,

    #[error("column maximum must be positive")]
    NonPositiveMax,

    #[error("empty date range: {start} > {end}")]
    EmptyRange { start: NaiveDate, end: NaiveDate },

    #[error("coefficient undefined: {0}")]
    UndefinedCoefficient(String),

    #[error("length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("degenerate k range {0}..={1}")]
    DegenerateRange(usize, usize),

    #[error("training set contains a single class")]
    SingleClass,

    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),

    #[error("unknown artifact type: {0}")]
    UnknownArtifact(String),

    #[error("infeasible synthetic spec: {0}")]
    Infeasible(String),

    #[error("unsupported model format version {0}")]
    ModelVersion(u32),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Flushes an in-memory CSV writer into a string.
pub(crate) fn finish_csv(wtr: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Io { .. } => "io",
            Error::MalformedRow { .. } => "malformed_row",
            Error::Header(_) => "header",
            Error::DuplicateCoinDay(_) => "duplicate_coin_day",
            Error::Auth { .. } => "auth",
            Error::RateLimitExhausted { .. } => "rate_limit_exhausted",
            Error::Http(_) => "http",
            Error::SchemaDrift { .. } => "schema_drift",
            Error::AllAbsent(_) => "all_absent",
            Error::ConstantColumn => "constant_column",
            Error::NonPositiveMax => "non_positive_max",
            Error::EmptyRange { .. } => "empty_range",
            Error::UndefinedCoefficient(_) => "undefined_coefficient",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::DegenerateRange(..) => "degenerate_range",
            Error::SingleClass => "single_class",
            Error::Hyperparameter(_) => "hyperparameter",
            Error::UnknownArtifact(_) => "unknown_artifact",
            Error::Infeasible(_) => "infeasible",
            Error::ModelVersion(_) => "model_version",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

fn format_offenders(offenders: &[(String, NaiveDate)]) -> String {
    offenders
        .iter()
        .map(|(k, d)| format!("({k}, {d})"))
        .collect::<Vec<_>>()
        .join(", ")
}
