use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// A numerical routine failed; `partial` is the best estimate reached.
    NumericalFailure { what: &'static str, partial: f64 },
    /// A configuration is inconsistent or exceeds a hard cap.
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NumericalFailure { what, partial } => {
                write!(f, "numerical failure in {what} (partial estimate {partial})")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
