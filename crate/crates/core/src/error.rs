use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency must be a positive integer, got {0}")]
    InvalidLambda(i64),
    #[error("division by zero: negative power of `{0}` evaluated at zero")]
    DivisionByZero(&'static str),
    #[error("expression still contains formal jets F_d or G_d")]
    JetsPresent,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("singularity at step {step}: |sin(theta)| = {sin:e}")]
    Singularity { step: usize, sin: f64 },
    #[error("trajectory reached the origin at step {step}")]
    Origin { step: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed record: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
