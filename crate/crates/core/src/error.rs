use thiserror::Error;

use crate::prob_model::Pair;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// A coefficient whose denominator vanished was needed.
    #[error("interference coefficient lambda[{row},{pair}] is undefined (zero amplitude)")]
    UndefinedLambda { row: usize, pair: Pair },

    #[error("interference coefficient lambda[{row},{pair}] = {value} lies outside [-1, 1]")]
    LambdaOutOfRange { row: usize, pair: Pair, value: f64 },

    #[error(
        "row {row}: lambda_23 = {target} matches neither {plus} nor {minus} (mismatch {mismatch:e})"
    )]
    InconsistentRow {
        row: usize,
        target: f64,
        plus: f64,
        minus: f64,
        mismatch: f64,
    },

    #[error("degenerate context {pair}: p_a[i] + p_a[j] = {mass:e}")]
    DegenerateContext { pair: Pair, mass: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid quantum instance: {0}")]
    InvalidInstance(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
