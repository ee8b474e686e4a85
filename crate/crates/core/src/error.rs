use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode `{0}` is already registered")]
    DuplicateMode(String),

    #[error("operators belong to different mode registries")]
    RegistryMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state space of dimension {dimension} exceeds the guard of {limit}")]
    DimensionGuard { dimension: u128, limit: u128 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("gate `{gate}` is not unitary (defect {defect:.3e})")]
    NonUnitary { gate: String, defect: f64 },

    #[error("rails collide: {0}")]
    RailCollision(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// `true` for guard and numerical errors, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DimensionGuard { .. } | Error::NumericalFailure(_)
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
