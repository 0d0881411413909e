use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle must be finite, got {0}")]
    InvalidAngle(f64),

    #[error("theta must lie in [0, 3pi/5), got {0}")]
    InvalidTheta(f64),

    #[error("interval message {index} names an empty interval for theta = {theta}")]
    InconsistentMessage { index: u8, theta: f64 },

    #[error("interval index {0} does not fit in four bits")]
    MessageOutOfRange(u8),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("protocol tried to send bit {attempted} with a budget of {budget}")]
    BudgetViolation { budget: usize, attempted: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown measurement: {0}")]
    UnknownMeasurement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
