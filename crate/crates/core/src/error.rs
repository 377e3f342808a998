//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{op} requires n <= {max}, got n = {n}")]
    GroundSetTooLarge {
        op: &'static str,
        n: usize,
        max: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate {index} = {value} outside [{lo}, {hi}]")]
    OutsideDomain {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("no closed-form multilinear extension for {family} models")]
    NoClosedForm { family: &'static str },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
