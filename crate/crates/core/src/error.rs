//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the workspace bounds")]
    OutOfBounds { point: Vec<f64> },

    #[error("gram matrix numerically singular (pivot {pivot:.3e}); duplicate point with zero noise?")]
    IllConditioned { pivot: f64 },

    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("empty arm list")]
    NoArms,

    #[error("arm {index} has no pulls; initialization round required")]
    UnpulledArm { index: usize },

    #[error("budget {budget} is infeasible for {arms} arms")]
    InfeasibleBudget { budget: usize, arms: usize },

    #[error("need at least 2 samples per arm for a t-test (got {count})")]
    InsufficientSamples { count: u64 },

    #[error("illegal action {action} from state {state:?}")]
    IllegalAction { action: usize, state: Vec<f64> },

    #[error("dataset is empty: {path}")]
    EmptyDataset { path: String },

    #[error("malformed dataset row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
