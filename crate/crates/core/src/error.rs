use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse kernel id `{input}`: {reason}")]
    KernelParse { input: String, reason: String },

    #[error("quadrature on [{a}, {b}] did not converge after {panels} panels")]
    Quadrature { a: f64, b: f64, panels: usize },

    #[error("kernel {kernel} violates partition of unity at table phase {phase}: residual {residual:e}")]
    NonConforming {
        kernel: String,
        phase: usize,
        residual: f64,
    },

    #[error("malformed image: {0}")]
    Format(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
