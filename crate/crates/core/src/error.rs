use thiserror::Error;

use crate::cooling::CoolingTrajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("accuracy: {what} (achieved {achieved:e}, error bound {bound:e})")]
    Accuracy {
        what: String,
        achieved: f64,
        bound: f64,
    },

    #[error("no steady state: all transition rates vanish")]
    NoSteadyState,

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// No scanned control offset produced refrigeration. Carries the least
    /// negative point for diagnostics.
    #[error("not coolable at T_C = {temperature:e}: best J_C = {best_current:e} at delta = {best_delta}")]
    NotCoolable {
        temperature: f64,
        best_delta: f64,
        best_current: f64,
    },

    #[error("step rejected {halvings} times at t = {t:e}: {reason}")]
    Stiffness {
        t: f64,
        halvings: u32,
        reason: String,
        trajectory: Box<CoolingTrajectory>,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error at `{path}`: {constraint}")]
    Validation { path: String, constraint: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            constraint: constraint.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation { .. } | Error::UnknownKey(_) => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}
