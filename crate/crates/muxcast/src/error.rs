//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // series / data validation
    #[error("series has no data")]
    EmptySeries,
    #[error("non-finite value {value} at row {row}, column {col}")]
    NonFinite { value: f64, row: usize, col: usize },
    #[error("duplicate dimension name '{0}'")]
    DuplicateDimName(String),
    #[error("empty column")]
    EmptyColumn,
    #[error("empty history")]
    EmptyHistory,
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    // scaling
    #[error("integer {value} does not fit in {digit_budget} digits")]
    OutOfRangeInt { value: u64, digit_budget: u32 },

    // multiplexing
    #[error("value {value} at row {row}, column {col} overflows {budget} digit(s)")]
    DigitOverflow {
        value: u64,
        row: usize,
        col: usize,
        budget: u32,
    },
    #[error("continuation contains no complete timestamp")]
    NoCompleteTimestamp,

    // sax
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("digital alphabet supports at most 10 symbols, got {0}")]
    DigitalAlphabetOverflow(usize),

    // backend
    #[error("backend unreachable: {0}")]
    BackendUnreachable(String),
    #[error("backend request timed out")]
    Timeout,
    #[error("backend returned HTTP status {0}")]
    HttpStatus(u16),
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    #[error("vocabulary constraint could not be enforced after {retries} retries")]
    ConstraintUnsupported { retries: u32 },

    // pipeline
    #[error("all {0} sampled continuations were invalid")]
    AllSamplesInvalid(usize),

    // baselines
    #[error("history too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("singular design matrix")]
    SingularDesign,

    // eval
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at row {row}, column {col}: {message}")]
    ParseError {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("ragged rows: row {row} has {got} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("bad split: test length {test_len} must be in [1, {n})")]
    BadSplit { test_len: usize, n: usize },

    // configuration
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Process exit code category used by the CLI: 1 usage, 2 io, 3 backend, 4 data.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            InvalidConfig(_) | AlphabetTooSmall(_) | DigitalAlphabetOverflow(_) => 1,
            Io(_) => 2,
            BackendUnreachable(_)
            | Timeout
            | HttpStatus(_)
            | MalformedResponse(_)
            | ConstraintUnsupported { .. }
            | AllSamplesInvalid(_) => 3,
            _ => 4,
        }
    }
}
