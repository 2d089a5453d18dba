use alloc::string::String;

use crate::oracle::lp::LpError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid information structure: {0}")]
    InvalidInformation(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("mechanism rejected: IC/IR violation of {max_violation:e}")]
    RejectedMechanism { max_violation: f64 },

    #[error("full-surplus condition fails for products ({0}, {1})")]
    ConditionFailed(usize, usize),

    #[error("{what} exceeds the size limit ({found} > {limit})")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator rejected {attempts} candidates without success")]
    RejectionBudget { attempts: usize },

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("internal error: {0}")]
    Internal(String),
}
