use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure constants are not commutative at (e{i}, e{j})")]
    NonCommutative { i: usize, j: usize },

    #[error("structure constants are not associative at (e{i}, e{j}, e{k})")]
    NonAssociative { i: usize, j: usize, k: usize },

    #[error("declared unit does not act as identity on e{0}")]
    BadUnit(usize),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("degree {0} exceeds the guard |n| <= 1000000")]
    DegreeOutOfRange(i64),

    #[error("level {level} exceeds computed depth {depth}; extend depth")]
    DepthExceeded { level: usize, depth: usize },

    #[error("index 0 is not part of the module V'_(0,0)")]
    ForbiddenIndex,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
