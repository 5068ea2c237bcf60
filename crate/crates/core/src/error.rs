use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight spec: {0}")]
    InvalidSpec(String),

    #[error("invalid index range: {a} > {b}")]
    InvalidRange { a: i64, b: i64 },

    #[error("index {index} outside window [{lo}, {hi}]")]
    OutOfWindow { index: i64, lo: i64, hi: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),

    #[error("parse error in {what} at line {line}, column {column}: {message}")]
    Parse {
        what: String,
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
