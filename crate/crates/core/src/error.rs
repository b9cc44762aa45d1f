use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: bad pmf, mismatched alphabets, structural violations.
    #[error("validation error: {0}")]
    Validation(String),
    /// A request that would exceed a configured size or enumeration cap.
    #[error("budget exceeded: {what} needs {required}, cap is {cap}")]
    Budget {
        what: String,
        required: u128,
        cap: u128,
    },
    /// Something that should be unreachable given validated inputs.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn over_budget<T>(what: impl Into<String>, required: u128, cap: u128) -> Result<T> {
    Err(Error::Budget {
        what: what.into(),
        required,
        cap,
    })
}
