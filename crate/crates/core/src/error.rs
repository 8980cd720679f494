use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weights must be finite and non-negative (component {index} is {value})")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("wealth must be strictly positive and finite, got {0}")]
    NonPositiveWealth(f64),
    #[error("invalid payoff model: {0}")]
    InvalidModel(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("stochastic exponent increment {0} must exceed -1")]
    ExponentJump(f64),
    #[error("relative wealth of the excluded investor is 1; the coalition has no weight")]
    EmptyCoalition,
    #[error("operation requires a finite-support discrete payoff model")]
    NotDiscrete,
    #[error("operation requires a jump-kernel payoff model")]
    NotContinuous,
    #[error("integration produced a non-finite state at t = {time}")]
    Integration { time: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
