use thiserror::Error;

use crate::contracted::ContractedWalkTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected, no spanning tree exists")]
    NoSpanningTree,

    #[error("input of size {size} exceeds the limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    /// The contracted walk hit `max_steps` before visiting every component.
    #[error("walk stopped after {steps} steps with {visited} of {total} components visited")]
    PartialCover {
        steps: usize,
        visited: usize,
        total: usize,
        trace: Box<ContractedWalkTrace>,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("random walk exceeded its budget of {budget} steps")]
    StepBudgetExceeded { budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
