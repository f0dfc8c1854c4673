use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution has no messages")]
    EmptyDistribution,

    #[error("probability at index {index} is not a finite number: {value}")]
    NonFiniteProbability { index: usize, value: f64 },

    #[error("negative probability at index {index}: {value}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, not 1 (tolerance {tolerance})")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("{labels} labels given for {probs} probabilities")]
    LabelCountMismatch { labels: usize, probs: usize },

    #[error("duplicate message label {0:?}")]
    DuplicateLabel(String),

    #[error("distributions are over different message sets ({left} vs {right} messages)")]
    MessageSetMismatch { left: usize, right: usize },

    #[error("relative entropy undefined: Q[{index}] = 0 but P[{index}] > 0")]
    UndefinedRelativeEntropy { index: usize },

    #[error("message index {index} out of range for {size} messages")]
    MessageOutOfRange { index: usize, size: usize },

    #[error("message {index} has zero probability and cannot be encoded")]
    ZeroProbabilityMessage { index: usize },

    #[error("alpha must be a finite real >= 1, got {0}")]
    InvalidAlpha(f64),

    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),

    #[error("requested {requested} stream bits, cap is {cap}")]
    StreamCapExceeded { requested: u64, cap: u64 },

    #[error("no message is consistent with the codeword (seed mismatch between parties?)")]
    EmptyCandidateSet,

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("invalid codeword: {0}")]
    InvalidCodeword(String),

    #[error("cannot construct instance: {0}")]
    InstanceConstruction(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for this error: 2 invalid input, 3 contract
    /// violation, 4 instance construction failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ContractViolation(_) => 3,
            Error::InstanceConstruction(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
