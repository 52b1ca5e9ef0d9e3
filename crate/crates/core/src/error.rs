use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading data, building designs, fitting or tuning.
#[derive(Debug, Error)]
pub enum SrlError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),
    #[error("column '{0}' not found")]
    ColumnNotFound(String),
    #[error("missing value in column '{column}' at data row {row}")]
    MissingValue { column: String, row: usize },
    #[error("non-numeric value '{value}' in column '{column}' at data row {row}")]
    NonNumeric {
        column: String,
        row: usize,
        value: String,
    },
    #[error("binomial response must be 0 or 1, found {value} at row {row}")]
    NonBinaryResponse { value: f64, row: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("all columns have zero variance")]
    AllColumnsConstant,
    #[error("response is constant")]
    ConstantResponse,
    #[error("no converged solution on the path")]
    NoConvergedFit,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SrlError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SrlError::InvalidInput(msg.into()))
}
