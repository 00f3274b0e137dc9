use thiserror::Error;

/// Errors raised by the optimization and accounting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A documented precondition of an operation does not hold. `inequality`
    /// names the failed condition so callers can report it verbatim.
    #[error("precondition violated: {inequality}")]
    Precondition { inequality: String },

    #[error("no privacy: sigma = 0 with positive sensitivity {sensitivity}")]
    NoPrivacy { sensitivity: f64 },

    #[error("truncation violated: conversion needs omega >= {required:.6}, budget has omega = {omega:.6}")]
    Truncation { required: f64, omega: f64 },

    #[error("calibration failed: accountant epsilon {achieved:.6} exceeds target {target:.6}; increase c2")]
    Calibration { achieved: f64, target: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("phase {phase}: {source}")]
    Phase { phase: usize, source: Box<Error> },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn precondition(inequality: impl Into<String>) -> Self {
        Error::Precondition { inequality: inequality.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Wraps an error with the (1-based) index of the phase that produced it.
    pub fn in_phase(self, phase: usize) -> Self {
        Error::Phase { phase, source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
