use thiserror::Error;

/// Every failure mode of the library, grouped by cause.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HemError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("operation undefined at {phase} phase (gamma = {gamma})")]
    Phase { phase: crate::params::Phase, gamma: f64 },
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("pole at substitution point in coefficient {0}")]
    PoleAtSubstitution(String),
    #[error("Gamma function pole at z = -{0}")]
    GammaPole(u64),
    #[error("unsupported pole order {0} (only simple poles are handled)")]
    UnsupportedPoleOrder(i32),
    #[error("pole at requested point needs a direction of approach")]
    PoleNeedsDirection,
    #[error("outside the convergence region: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("numerical conditioning: {0}")]
    Conditioning(String),
    #[error("division by zero in exact arithmetic")]
    DivisionByZero,
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, HemError>;
