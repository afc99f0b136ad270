use thiserror::Error;

/// Errors produced by the podlab library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: u64 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },

    #[error("constant term {0} is not a unit")]
    NonUnit(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("pod table has order {available}, but order {required} is required")]
    InsufficientTable { required: u64, available: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
