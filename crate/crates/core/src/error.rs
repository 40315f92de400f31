use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("collected samples ({collected}) exceed the environment total ({m_total})")]
    CollectedExceedsTotal { collected: f64, m_total: u64 },

    #[error("no allocation admits at least one training round")]
    Infeasible,

    #[error("no sensing allocation supports {rounds} rounds within the budgets")]
    RoundsInfeasible { rounds: u64 },

    #[error("collected set is empty")]
    EmptyCollection,
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
