use thiserror::Error;

use crate::multiplier::MembershipReport;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A multiplier outside the domain of the summing operator.
    #[error("domain error: {message}")]
    Domain {
        message: String,
        report: Box<MembershipReport>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario `{scenario}`, field `{field}`: {message}")]
    Config {
        scenario: String,
        field: String,
        message: String,
    },

    #[error("quadratic-cost guard exceeded: n = {n} > {limit}")]
    GuardExceeded { n: usize, limit: usize },

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        LabError::Validation(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io(_) => 3,
            LabError::Domain { .. } | LabError::Analysis(_) | LabError::GuardExceeded { .. } => 2,
            _ => 1,
        }
    }
}
