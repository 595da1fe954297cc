use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("Riesz order alpha={alpha} outside (0, {dim})")]
    InvalidAlpha { alpha: f64, dim: u32 },

    #[error("field and kernel live on different grids")]
    GridMismatch,

    #[error("component {0} vanishes identically; cannot project onto the mass torus")]
    ZeroField(&'static str),

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("side condition violated: {0}")]
    SideConditionViolated(String),

    #[error("threshold numerator is not positive: {0}")]
    NonPositive(String),

    #[error("operation requires regime {expected}, got {got}")]
    WrongRegime { expected: String, got: String },

    #[error("no fiber maximum found: {0}")]
    FiberDegenerate(String),

    #[error("solver diverged: {0}")]
    Diverged(String),

    #[error("iteration budget exhausted after {} iterations", .0.log.len())]
    MaxIters(Box<SolveReport>),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("kernel cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidAlpha { .. }
            | Error::Config(_)
            | Error::Parse(_)
            | Error::GridMismatch
            | Error::WrongRegime { .. } => 2,
            Error::SideConditionViolated(_) | Error::NonPositive(_) => 4,
            _ => 3,
        }
    }
}
