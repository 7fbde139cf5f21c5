use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sparse spectrum: {0}")]
    InvalidSpec(String),

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("{divisor} does not divide signal length {n}")]
    Divisibility { n: u64, divisor: u64 },

    #[error("{a} has no inverse modulo {modulus}")]
    NoInverse { a: u64, modulus: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("invalid moduli configuration: {0}")]
    Configuration(String),

    #[error("adversarial construction failed: {0}")]
    Construction(String),

    #[error("signal file format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
