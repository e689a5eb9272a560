use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node")]
    UnknownNode,
    #[error("self-loop rejected")]
    SelfLoop,
    #[error("empty graph")]
    EmptyGraph,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("{0}")]
    Numerical(String),
    #[error("step too large")]
    StepTooLarge,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}
