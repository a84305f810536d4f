use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("beta must exceed 1 (lower guard {guard}), got {beta}")]
    InvalidBeta { beta: String, guard: String },

    #[error("invalid precision context: {0}")]
    InvalidContext(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The escalation ladder reached `cap_digits` without two consecutive
    /// levels agreeing to `target_digits`.
    #[error("precision exhausted: no {target}-digit agreement up to the {cap}-digit cap")]
    PrecisionExhausted { target: u32, cap: u32 },

    /// An extremum of the null function sits too close to zero to decide
    /// its sign at the current working precision.
    #[error("beta {beta} is too close to a singular velocity to separate the merging root pair")]
    NearSingularBeta { beta: String },

    #[error("test point lies on the Cerenkov cone (|K| = {k})")]
    SingularCone { k: String },

    #[error("{0} did not converge")]
    NoConvergence(String),

    #[error("Z is zero to working precision; no equilibrium radius")]
    ZeroZ,
}

impl Error {
    /// True for failures that more working precision may cure.
    pub fn is_precision_limited(&self) -> bool {
        matches!(
            self,
            Error::NearSingularBeta { .. } | Error::SingularCone { .. } | Error::NoConvergence(_)
        )
    }
}
