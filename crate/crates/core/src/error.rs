use std::io;

use thiserror::Error;

/// Decoding failures for the binary cube and image containers.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("truncated input: needed {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("non-finite value at payload index {0}")]
    NonFinite(usize),
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("invalid json: {0}")]
    Json(String),
}

impl FormatError {
    /// Short stable identifier, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::BadMagic { .. } => "bad_magic",
            FormatError::Truncated { .. } => "truncated",
            FormatError::TrailingBytes(_) => "trailing_bytes",
            FormatError::NonFinite(_) => "non_finite_payload",
            FormatError::InvalidHeader(_) => "invalid_header",
            FormatError::Json(_) => "invalid_json",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NonFinite(_) => "non_finite",
            Error::Numerical(_) => "numerical",
            Error::Format(f) => f.code(),
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
