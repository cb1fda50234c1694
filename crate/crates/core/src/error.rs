use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZenoError {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("trace drift {drift:.3e} exceeds limit {limit:.3e}; increase the integrator step count")]
    TraceDriftExceeded { drift: f64, limit: f64 },

    #[error("jump operator rate must be non-negative, got {0}")]
    NegativeRate(f64),

    #[error("invalid projector set: {0}")]
    InvalidProjectorSet(String),

    #[error("all outcome probabilities vanish; the state is numerically invalid")]
    DegenerateOutcome,

    #[error("measurement strength {0} outside [0, 1]")]
    StrengthOutOfRange(f64),

    #[error("kick operator is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryKick { deviation: f64 },

    #[error("subspace is empty")]
    EmptySubspace,

    #[error("subspace covers the whole space")]
    FullSubspace,

    #[error("level index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid event count {0}")]
    InvalidCount(usize),

    #[error("invalid duration {0}")]
    InvalidDuration(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("objective evaluation failed: {0}")]
    ObjectiveEvaluationFailed(String),

    #[error("invalid config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl ZenoError {
    /// Errors caused by the input configuration rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            ZenoError::ConfigInvalid { .. }
                | ZenoError::ConfigParse(_)
                | ZenoError::NonUnitaryKick { .. }
        )
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ZenoError::ConfigInvalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = ZenoError> = std::result::Result<T, E>;
