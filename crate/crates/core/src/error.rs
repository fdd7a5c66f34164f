use thiserror::Error;

use crate::solver::NonConvergence;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("non-finite integrand value at s = {location}")]
    Integration { location: f64 },

    #[error("fixed-point iteration did not converge: {0}")]
    NonConvergence(Box<NonConvergence>),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown catalog problem `{0}`")]
    UnknownProblem(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(what: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain { what, value, domain })
    }
}
