use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid graph parameters: {0}")]
    InvalidParams(String),

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("number of trials must be at least 1")]
    ZeroTrials,

    #[error("weights must be finite")]
    NonFiniteWeights,

    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("label ({x}, {y}) lies outside the window")]
    OutOfWindow { x: i64, y: i64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("roulette weights must be non-negative with a positive sum")]
    InvalidWheel,

    #[error("marked set has {found} entries but the walk was prepared for k = {expected}")]
    InconsistentMarked { expected: u64, found: u64 },

    #[error("no (window, dp) pair in the schedule contains a solution")]
    Exhausted,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
