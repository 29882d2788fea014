//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// Numeric routines distinguish *domain* exits (the model's chart predicate
/// fails), *signature* violations (a metric block loses positive
/// definiteness or a shift outruns the lapse), and *singular field* values
/// (a denominator like η² or ξχ² falls below [`EPS_SING`]). The distinction
/// matters to callers: a domain exit asks for a different start point, a
/// signature failure asks for different geometry data.
#[derive(Debug, Error)]
pub enum IgError {
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("singular scalar field: {0}")]
    SingularField(String),

    #[error("metric signature violation: {0}")]
    Signature(String),

    #[error("field evaluation failed: {0}")]
    Evaluation(String),

    #[error("zero velocity where a nonzero vector is required")]
    ZeroVelocity,

    #[error("step limit of {0} steps exceeded")]
    StepLimitExceeded(usize),

    #[error("domain boundary hit at parameter {param}")]
    DomainBoundaryHit {
        param: f64,
        /// Last state that still satisfied the domain predicate.
        state: Vec<f64>,
    },

    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl IgError {
    /// Errors that mean "the trajectory left the region where the fields
    /// make sense" — the domain guard in the integrators converts these
    /// into a truncated trajectory instead of a hard failure.
    pub fn is_boundary_kind(&self) -> bool {
        matches!(
            self,
            IgError::Domain(_)
                | IgError::SingularField(_)
                | IgError::Signature(_)
                | IgError::Evaluation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, IgError>;

/// Threshold below which scalar denominators (η², ξχ², Ω², …) are treated
/// as singular rather than divided through.
pub const EPS_SING: f64 = 1e-12;
