use thiserror::Error;

pub type Result<T, E = DomainError> = core::result::Result<T, E>;

/// Errors raised by the pure formulas and the config constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("coefficient-sum: beta + gamma + lambda = {0}, expected 1")]
    CoefficientSum(f64),
    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("empty history: payoff is undefined without past requests")]
    EmptyHistory,
    #[error("empty step list")]
    EmptySteps,
    #[error("zipf exponent must lie in (0, 1), got {0}")]
    ZipfExponent(f64),
    #[error("content id {0} outside 1..={1}")]
    ContentOutOfRange(u32, u32),
    #[error("no latency between regions {0} and {1}")]
    MissingLatency(u16, u16),
    #[error("latency matrix: {0}")]
    LatencyMatrix(&'static str),
}
